"""Scheme comparison, diversity slopes and the diversity bound.

The per-subcarrier over bulk outage ratio phi(density) admits an exact
alternating-sum form in the area integrals Delta(k), a small-density
quadratic approximation, and an inverse giving the minimum relay density
for a target advantage.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

from scipy import integrate, optimize

from .analytic import (
    DEFAULT_QUADRATURE,
    DomainError,
    QuadratureSettings,
    _quad,
    exp_integral_E,
    lower_incomplete_gamma,
    outage_bulk,
    outage_ps,
)
from .channel import SystemParams
from .geometry import Region


class OutageUnderflowError(ArithmeticError):
    """Outage underflowed to zero; evaluate the curve in log domain
    (see analytic.log_outage_bulk) and pass log_domain=True."""


@dataclass(frozen=True)
class RatioResult:
    """Outage ratio per-subcarrier/bulk at one relay density."""

    phi: float
    phi_approx: float
    density: float


@dataclass(frozen=True)
class DiversityEstimate:
    """Finite-window diversity slope in decades of outage per decade of SNR."""

    slope: float
    snr_window: tuple[float, float]


@lru_cache(maxsize=1024)
def _delta_cached(k: int, big_k: int, c: float, alpha: float, r_sd: float,
                  region: Region, q: QuadratureSettings) -> float:
    def integrand(r: float, theta: float) -> float:
        r_md = math.sqrt(max(r_sd**2 + r**2 - 2 * r_sd * r * math.cos(theta), 0.0))
        g = math.exp(-c * (r**alpha + r_md**alpha))  # 1 - F
        f = 1.0 - g
        return r * (1.0 - f**k - g**big_k)

    if region.kind == "disc":
        sigma = region.radius

        def inner(theta: float) -> float:
            return _quad(lambda r: integrand(r, theta), 0.0, sigma, q,
                         "delta_k inner")
    else:
        def inner(theta: float) -> float:
            return _quad(lambda t: integrand(t / (1.0 - t), theta)
                         / (1.0 - t) ** 2, 0.0, 1.0, q, "delta_k inner")

    return 2.0 * _quad(inner, 0.0, math.pi, q, "delta_k outer")


def delta_k(k: int, params: SystemParams, region: Region,
            q: QuadratureSettings = DEFAULT_QUADRATURE) -> float:
    """Area integral of 1 - F**k - (1-F)**K over the region.

    Positive and bounded for 1 <= k <= K when K >= 2.
    """
    if not 1 <= k <= params.subcarriers:
        raise ValueError("need 1 <= k <= subcarriers")
    c = params.threshold / params.snr_budget
    return _delta_cached(k, params.subcarriers, c, params.path_loss,
                         params.r_sd, region, q)


def _delta_table(params: SystemParams, region: Region,
                 q: QuadratureSettings) -> list[float]:
    return [delta_k(k, params, region, q)
            for k in range(1, params.subcarriers + 1)]


def _phi_from_deltas(density: float, deltas: list[float]) -> float:
    big_k = len(deltas)
    return math.fsum(math.comb(big_k, k) * (-1) ** (k + 1)
                     * math.exp(-density * deltas[k - 1])
                     for k in range(1, big_k + 1))


def _phi_approx_from_deltas(density: float, deltas: list[float]) -> float:
    big_k = len(deltas)
    quad_sum = math.fsum(math.comb(big_k, k) * (-1) ** (k + 1)
                         * deltas[k - 1] ** 2
                         for k in range(1, big_k + 1))
    return 1.0 + 0.5 * density**2 * quad_sum


def outage_ratio(params: SystemParams, region: Region, density: float,
                 q: QuadratureSettings = DEFAULT_QUADRATURE,
                 cross_check_rtol: float = 1e-5) -> RatioResult:
    """Exact outage ratio phi = Phi_ps / Phi_bulk at one density.

    Evaluates both the Delta-based alternating sum and the direct
    quotient of the two outage integrals; they are the same identity, so
    disagreement beyond cross_check_rtol signals a numerical problem.
    """
    if density < 0:
        raise ValueError("density must be >= 0")
    deltas = _delta_table(params, region, q)
    phi = _phi_from_deltas(density, deltas)
    quotient = outage_ps(params, region, density, q) / outage_bulk(
        params, region, density, q)
    if not math.isclose(phi, quotient, rel_tol=cross_check_rtol,
                        abs_tol=cross_check_rtol):
        raise ArithmeticError(
            f"ratio cross-check failed: Delta-sum {phi!r} vs quotient "
            f"{quotient!r}")
    return RatioResult(phi=phi,
                       phi_approx=_phi_approx_from_deltas(density, deltas),
                       density=density)


def outage_ratio_approx(params: SystemParams, region: Region, density: float,
                        q: QuadratureSettings = DEFAULT_QUADRATURE) -> float:
    """Quadratic small-density approximation of the outage ratio."""
    if density < 0:
        raise ValueError("density must be >= 0")
    return _phi_approx_from_deltas(density, _delta_table(params, region, q))


@dataclass(frozen=True)
class MinDensityResult:
    """Minimum relay density for a target outage-ratio advantage.

    density_approx comes from the closed small-density formula;
    density_exact from numerically inverting the exact ratio.
    """

    density_approx: float
    density_exact: float
    epsilon: float


def min_density_for_advantage(epsilon: float, params: SystemParams,
                              region: Region,
                              q: QuadratureSettings = DEFAULT_QUADRATURE
                              ) -> MinDensityResult:
    """Smallest density with phi(density) <= epsilon, plus its approximation."""
    if not 0 < epsilon <= 1:
        raise ValueError("epsilon must be in (0, 1]")
    deltas = _delta_table(params, region, q)
    big_k = len(deltas)
    quad_sum = math.fsum(math.comb(big_k, k) * (-1) ** (k + 1)
                         * deltas[k - 1] ** 2
                         for k in range(1, big_k + 1))
    if epsilon == 1.0:
        return MinDensityResult(0.0, 0.0, epsilon)
    radicand = 2.0 * (epsilon - 1.0) / quad_sum
    if radicand < 0:
        raise DomainError("epsilon target inconsistent with the sign of the "
                          "quadratic coefficient")
    approx = math.sqrt(radicand)

    def gap(density: float) -> float:
        return _phi_from_deltas(density, deltas) - epsilon

    hi = max(approx, 1e-6)
    while gap(hi) > 0:
        hi *= 2.0
        if hi > 1e9:
            raise ArithmeticError("could not bracket the exact inverse")
    exact = optimize.brentq(gap, 0.0, hi, xtol=1e-12, rtol=1e-12)
    return MinDensityResult(density_approx=approx, density_exact=exact,
                            epsilon=epsilon)


def diversity_slope(outage_curve: Callable[[float], float],
                    snr_lo: float, snr_hi: float,
                    log_domain: bool = False) -> DiversityEstimate:
    """Finite-window diversity slope of an outage-vs-SNR curve.

    With log_domain=True the curve returns ln(outage), which avoids
    underflow at extreme SNR (bulk curves have a log evaluation path).
    """
    if not 0 < snr_lo < snr_hi:
        raise ValueError("need snr_hi > snr_lo > 0")
    lo, hi = outage_curve(snr_lo), outage_curve(snr_hi)
    if log_domain:
        log_lo, log_hi = lo, hi
    else:
        if lo <= 0 or hi <= 0:
            raise OutageUnderflowError(
                "outage underflowed to zero; evaluate in log domain")
        log_lo, log_hi = math.log(lo), math.log(hi)
    slope = -(log_hi - log_lo) / (math.log(snr_hi) - math.log(snr_lo))
    return DiversityEstimate(slope=slope, snr_window=(snr_lo, snr_hi))


def appendix_bound_T1(params: SystemParams) -> float:
    """Closed-form radial bound used in the infinite-region diversity proof.

    (P_t/(K s N_0))**(2/a) * exp(-K s N_0 (2 r_SD)**a / P_t)
        * gamma_lower(2/a, K s N_0 r_SD**a / P_t)
    + (r_SD**2 / a) * E_{(a-2)/a}((1 + 2**a) K s N_0 r_SD**a / P_t)
    """
    a = params.path_loss
    c = params.subcarriers * params.threshold / params.snr_budget
    r = params.r_sd
    term1 = ((1.0 / c) ** (2.0 / a) * math.exp(-c * (2.0 * r) ** a)
             * lower_incomplete_gamma(2.0 / a, c * r**a))
    term2 = (r**2 / a) * exp_integral_E((a - 2.0) / a, (1.0 + 2.0**a) * c * r**a)
    return term1 + term2


def appendix_bound_T1_quadrature(params: SystemParams,
                                 q: QuadratureSettings = DEFAULT_QUADRATURE
                                 ) -> float:
    """Direct quadrature of the defining integral (cross-check path)."""
    a = params.path_loss
    c = params.subcarriers * params.threshold / params.snr_budget
    r_sd = params.r_sd

    def rational(t: float) -> float:
        r = t / (1.0 - t)
        far = 2.0 * max(r, r_sd)
        return r * math.exp(-c * (r**a + far**a)) / (1.0 - t) ** 2

    return _quad(rational, 0.0, 1.0, q, "appendix_bound_T1")
