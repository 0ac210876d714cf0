"""Subcarrier-count optimisation for bulk selection.

Throughput kappa(K, density) = K * (1 - Phi_bulk(K)) is concave in the
relaxed real-valued subcarrier count, so a bracketed golden-section
search finds the relaxed optimum; integer optima follow the stated
rounding rules. A cut-off density marks where an outage ceiling becomes
unattainable even at K = 1.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from scipy import optimize as sopt

from .analytic import (
    DEFAULT_QUADRATURE,
    DomainError,
    QuadratureSettings,
    _require_freespace,
    outage_bulk,
    outage_floor,
    u_disc,
    u_plane,
)
from .channel import SystemParams
from .geometry import Region

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
_K_CAP = 2**16


class UnboundedOptimumError(RuntimeError):
    """Bracket expansion ran past the cap; parameters are degenerate."""


@dataclass(frozen=True)
class OptimizationResult:
    """Relaxed and integer-optimal subcarrier counts.

    feasible is False only in the constrained problem when no K >= 1
    meets the outage ceiling; then k_opt = 0.
    """

    k_relaxed: float
    k_opt: int
    kappa_opt: float
    feasible: bool
    psi: float | None = None


def throughput(subcarriers: float, params: SystemParams, region: Region,
               density: float,
               q: QuadratureSettings = DEFAULT_QUADRATURE) -> float:
    """kappa(K, density) for bulk selection; K may be real (relaxed)."""
    if subcarriers <= 0:
        raise ValueError("subcarriers must be > 0")
    phi = outage_bulk(params, region, density, q, subcarriers=subcarriers)
    return subcarriers * (1.0 - phi)


def _golden_section_max(f, lo: float, hi: float, tol: float = 1e-6) -> float:
    a, b = lo, hi
    x1 = b - _GOLDEN * (b - a)
    x2 = a + _GOLDEN * (b - a)
    f1, f2 = f(x1), f(x2)
    while b - a > tol:
        if f1 < f2:
            a, x1, f1 = x1, x2, f2
            x2 = a + _GOLDEN * (b - a)
            f2 = f(x2)
        else:
            b, x2, f2 = x2, x1, f1
            x1 = b - _GOLDEN * (b - a)
            f1 = f(x1)
    return 0.5 * (a + b)


def _relaxed_optimum(kappa, k_hi_start: float = 2.0) -> float:
    """Bracket the concave maximum by doubling, then golden section."""
    k_hi = k_hi_start
    best = kappa(k_hi)
    while kappa(2.0 * k_hi) > best:
        k_hi *= 2.0
        best = kappa(k_hi)
        if k_hi > _K_CAP:
            raise UnboundedOptimumError(
                f"throughput still increasing past K = {_K_CAP}")
    return _golden_section_max(kappa, 1e-9, 2.0 * k_hi)


def optimize_K_unconstrained(params: SystemParams, region: Region,
                             density: float,
                             q: QuadratureSettings = DEFAULT_QUADRATURE
                             ) -> OptimizationResult:
    """Maximise kappa over the relaxed K, then round.

    The ceiling wins the rounding tie: k_opt = ceil if
    kappa(ceil) >= kappa(floor), else floor.
    """
    if density <= 0:
        raise ValueError("density must be > 0")

    def kappa(k: float) -> float:
        return throughput(k, params, region, density, q)

    k_relaxed = _relaxed_optimum(kappa)
    k_floor = max(1, math.floor(k_relaxed))
    k_ceil = max(1, math.ceil(k_relaxed))
    if kappa(k_ceil) >= kappa(k_floor):
        k_opt = k_ceil
    else:
        k_opt = k_floor
    return OptimizationResult(k_relaxed=k_relaxed, k_opt=k_opt,
                              kappa_opt=kappa(k_opt), feasible=True)


def optimize_K_constrained(params: SystemParams, region: Region,
                           density: float, psi: float,
                           q: QuadratureSettings = DEFAULT_QUADRATURE
                           ) -> OptimizationResult:
    """Maximise kappa subject to Phi_bulk(K) <= psi; k_opt = floor(relaxed).

    Infeasibility (even K = 1 violates psi, or psi is below the outage
    floor of a finite region) is reported via feasible=False and
    k_opt = 0, not an exception.
    """
    if not 0 < psi <= 1:
        raise ValueError("psi must be in (0, 1]")
    if density <= 0:
        raise ValueError("density must be > 0")

    def phi(k: float) -> float:
        return outage_bulk(params, region, density, q, subcarriers=k)

    if region.kind == "disc" and psi < outage_floor(density, region.area):
        return OptimizationResult(k_relaxed=0.0, k_opt=0, kappa_opt=0.0,
                                  feasible=False, psi=psi)
    if phi(1.0) > psi:
        return OptimizationResult(k_relaxed=0.0, k_opt=0, kappa_opt=0.0,
                                  feasible=False, psi=psi)

    unconstrained = optimize_K_unconstrained(params, region, density, q)
    if phi(unconstrained.k_relaxed) <= psi:
        k_relaxed = unconstrained.k_relaxed
    else:
        # Phi is increasing in the relaxed K, so the ceiling binds
        k_max = sopt.brentq(lambda k: phi(k) - psi, 1.0,
                            max(unconstrained.k_relaxed, 1.0 + 1e-9),
                            xtol=1e-9)
        k_relaxed = k_max
    k_opt = max(1, math.floor(k_relaxed))

    def kappa(k: float) -> float:
        return throughput(k, params, region, density, q)

    return OptimizationResult(k_relaxed=k_relaxed, k_opt=k_opt,
                              kappa_opt=kappa(k_opt), feasible=True, psi=psi)


def cutoff_density(psi: float, params: SystemParams, region: Region,
                   q: QuadratureSettings = DEFAULT_QUADRATURE) -> float:
    """Density below which the ceiling psi cannot be met even at K = 1."""
    if not 0 < psi < 1:
        raise ValueError("psi must be in (0, 1)")
    if region.kind == "disc":
        denom = 2.0 * u_disc(region.radius, 1.0, params, q)
    else:
        denom = 2.0 * u_plane(1.0, params, q)
    return -math.log(psi) / denom


def cutoff_density_freespace(psi: float, params: SystemParams) -> float:
    """Free-space (alpha=2) approximation of the plane cut-off density."""
    if not 0 < psi < 1:
        raise ValueError("psi must be in (0, 1)")
    _require_freespace(params)
    s = params.threshold
    budget = params.snr_budget
    return (-2.0 * s * math.log(psi)
            / (math.pi * budget * math.exp(-params.r_sd**2 * s / (2.0 * budget))))
