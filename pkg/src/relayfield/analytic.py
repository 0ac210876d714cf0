"""Exact, asymptotic and closed-form outage expressions.

The exact results are double integrals of the kernel
H(n) = r * exp(-(n*s/(P_t/N_0)) * (r**alpha + r_mD**alpha))
over the half-disc (a symmetry factor 2 covers theta in [pi, 2pi)).
Semi-infinite radial integrals use the rational substitution
r = t/(1-t) so a single bounded-domain adaptive routine serves both
regions.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache

import mpmath
import numpy as np
from scipy import integrate, special

from .channel import SystemParams
from .geometry import Region, relay_dest_distance


class QuadratureError(RuntimeError):
    """Adaptive quadrature failed to converge; carries the best estimate."""

    def __init__(self, message: str, estimate: float):
        super().__init__(f"{message} (estimate {estimate!r})")
        self.estimate = estimate


class NumericalInstabilityError(RuntimeError):
    """Alternating binomial sum cancelled beyond double precision.

    Use a smaller subcarrier count or higher-precision arithmetic.
    """


class DomainError(ValueError):
    """Operation called outside its supported parameter domain."""


@dataclass(frozen=True)
class QuadratureSettings:
    abs_tol: float = 1e-10
    rel_tol: float = 1e-8
    max_subdivisions: int = 200

    def __post_init__(self):
        if self.abs_tol <= 0 or self.rel_tol <= 0:
            raise ValueError("tolerances must be > 0")


DEFAULT_QUADRATURE = QuadratureSettings()

# binom(K, K/2) approaches 1/eps near K = 64; beyond that the
# alternating sums cancel below double precision
MAX_SUBCARRIERS_EXACT = 64


def integrand_H(n: float, r: float, theta: float,
                params: SystemParams) -> float:
    """Radial kernel of all outage integrals; accepts real n (relaxed K)."""
    if r < 0:
        raise ValueError("r must be >= 0")
    a = params.path_loss
    r_md = relay_dest_distance(r, theta, params.r_sd)
    c = n * params.threshold / params.snr_budget
    return r * math.exp(-c * (r**a + r_md**a))


def _quad(f, lo, hi, q: QuadratureSettings, what: str) -> float:
    val, err, info, *msg = integrate.quad(
        f, lo, hi, epsabs=q.abs_tol, epsrel=q.rel_tol,
        limit=q.max_subdivisions, full_output=True)
    if msg:
        raise QuadratureError(f"quadrature did not converge in {what}", val)
    return val


@lru_cache(maxsize=4096)
def _u_disc_cached(sigma: float, c: float, alpha: float, r_sd: float,
                   q: QuadratureSettings) -> float:
    def inner(theta: float) -> float:
        def radial(r: float) -> float:
            r_md = math.sqrt(max(r_sd**2 + r**2 - 2 * r_sd * r * math.cos(theta), 0.0))
            return r * math.exp(-c * (r**alpha + r_md**alpha))
        return _quad(radial, 0.0, sigma, q, "u_disc inner")

    return _quad(inner, 0.0, math.pi, q, "u_disc outer")


def u_disc(sigma: float, n: float, params: SystemParams,
           q: QuadratureSettings = DEFAULT_QUADRATURE) -> float:
    """Half-disc integral of H(n) over [0, sigma] x [0, pi]."""
    if sigma <= 0:
        raise ValueError("sigma must be > 0")
    c = n * params.threshold / params.snr_budget
    return _u_disc_cached(sigma, c, params.path_loss, params.r_sd, q)


@lru_cache(maxsize=4096)
def _u_plane_cached(c: float, alpha: float, r_sd: float,
                    q: QuadratureSettings) -> float:
    def inner(theta: float) -> float:
        def rational(t: float) -> float:
            r = t / (1.0 - t)
            r_md = math.sqrt(max(r_sd**2 + r**2 - 2 * r_sd * r * math.cos(theta), 0.0))
            return r * math.exp(-c * (r**alpha + r_md**alpha)) / (1.0 - t) ** 2
        return _quad(rational, 0.0, 1.0, q, "u_plane inner")

    return _quad(inner, 0.0, math.pi, q, "u_plane outer")


def u_plane(n: float, params: SystemParams,
            q: QuadratureSettings = DEFAULT_QUADRATURE) -> float:
    """Semi-infinite integral of H(n) over [0, inf) x [0, pi]."""
    c = n * params.threshold / params.snr_budget
    if c <= 0:
        raise DomainError("plane integral diverges for n <= 0")
    return _u_plane_cached(c, params.path_loss, params.r_sd, q)


def _u_region(region: Region, n: float, params: SystemParams,
              q: QuadratureSettings) -> float:
    if region.kind == "disc":
        return u_disc(region.radius, n, params, q)
    return u_plane(n, params, q)


def log_outage_bulk(params: SystemParams, region: Region, density: float,
                    q: QuadratureSettings = DEFAULT_QUADRATURE,
                    subcarriers: float | None = None) -> float:
    """Natural log of the bulk outage probability (underflow-safe).

    subcarriers overrides params.subcarriers and may be real (relaxed K).
    """
    if density < 0:
        raise ValueError("density must be >= 0")
    n = params.subcarriers if subcarriers is None else subcarriers
    return -2.0 * density * _u_region(region, n, params, q)


def outage_bulk(params: SystemParams, region: Region, density: float,
                q: QuadratureSettings = DEFAULT_QUADRATURE,
                subcarriers: float | None = None) -> float:
    """Bulk-selection outage probability over either region."""
    return math.exp(log_outage_bulk(params, region, density, q, subcarriers))


def outage_bulk_disc(params: SystemParams, density: float, sigma: float,
                     q: QuadratureSettings = DEFAULT_QUADRATURE) -> float:
    """exp(-2 * density * u(sigma, K)) on the finite disc."""
    return outage_bulk(params, Region.disc(sigma), density, q)


def outage_bulk_plane(params: SystemParams, density: float,
                      q: QuadratureSettings = DEFAULT_QUADRATURE) -> float:
    """Bulk outage over the infinite plane, any path loss exponent."""
    return outage_bulk(params, Region.plane(), density, q)


def _alternating_outage(k_total: int, inner_value) -> float:
    """Sum binom(K,k) (-1)^(k+1) exp(-inner_value(k)) with a cancellation guard."""
    if k_total > MAX_SUBCARRIERS_EXACT:
        raise NumericalInstabilityError(
            f"subcarrier count {k_total} exceeds the double-precision "
            f"cancellation limit {MAX_SUBCARRIERS_EXACT}")
    terms = [math.comb(k_total, k) * (-1) ** (k + 1) * math.exp(-inner_value(k))
             for k in range(1, k_total + 1)]
    total = math.fsum(terms)
    slack = 1e-12 + 1e-15 * max(abs(t) for t in terms)
    if total < -slack or total > 1.0 + slack:
        raise NumericalInstabilityError(
            f"alternating sum left [0, 1] ({total!r}); reduce the subcarrier "
            f"count or tighten quadrature tolerances")
    return min(max(total, 0.0), 1.0)


def outage_ps(params: SystemParams, region: Region, density: float,
              q: QuadratureSettings = DEFAULT_QUADRATURE) -> float:
    """Per-subcarrier outage probability over either region."""
    if density < 0:
        raise ValueError("density must be >= 0")
    big_k = params.subcarriers
    u = {n: _u_region(region, n, params, q) for n in range(1, big_k + 1)}

    def inner(k: int) -> float:
        return 2.0 * density * math.fsum(
            math.comb(k, n) * (-1) ** (n + 1) * u[n] for n in range(1, k + 1))

    return _alternating_outage(big_k, inner)


def outage_ps_disc(params: SystemParams, density: float, sigma: float,
                   q: QuadratureSettings = DEFAULT_QUADRATURE) -> float:
    """Per-subcarrier outage on the finite disc (alternating binomial sum)."""
    return outage_ps(params, Region.disc(sigma), density, q)


def outage_ps_plane(params: SystemParams, density: float,
                    q: QuadratureSettings = DEFAULT_QUADRATURE) -> float:
    """Per-subcarrier outage over the infinite plane."""
    return outage_ps(params, Region.plane(), density, q)


def _require_freespace(params: SystemParams):
    if params.path_loss != 2:
        raise DomainError("closed form requires path_loss == 2")


def log_outage_bulk_plane_freespace(params: SystemParams,
                                    density: float) -> float:
    """Log of the free-space (alpha=2) plane bulk closed form."""
    _require_freespace(params)
    ks = params.subcarriers * params.threshold
    return (-density * math.pi * params.snr_budget / (2.0 * ks)
            * math.exp(-params.r_sd**2 * ks / (2.0 * params.snr_budget)))


def outage_bulk_plane_freespace(params: SystemParams, density: float) -> float:
    """Free-space (alpha=2) closed form of the plane bulk outage."""
    return math.exp(log_outage_bulk_plane_freespace(params, density))


def outage_ps_plane_freespace(params: SystemParams, density: float) -> float:
    """Free-space (alpha=2) closed form of the plane per-subcarrier outage."""
    _require_freespace(params)
    s = params.threshold
    budget = params.snr_budget

    def inner(k: int) -> float:
        return density * math.pi * math.fsum(
            math.comb(k, n) * (-1) ** (n + 1) * budget / (2.0 * n * s)
            * math.exp(-params.r_sd**2 * n * s / (2.0 * budget))
            for n in range(1, k + 1))

    return _alternating_outage(params.subcarriers, inner)


def tau_alpha(alpha: float, r_sd: float, sigma: float) -> float:
    """Coefficient of the high-SNR expansion, tabulated for alpha in {2,4,6}."""
    if alpha == 2:
        return r_sd**2 + sigma**2
    if alpha == 4:
        return r_sd**4 + 2.0 * r_sd**2 * sigma**2 + (2.0 / 3.0) * sigma**4
    if alpha == 6:
        return 0.5 * (2.0 * r_sd**2 + sigma**2) * (
            r_sd**4 + 4.0 * r_sd**2 * sigma**2 + sigma**4)
    raise DomainError(f"asymptotic coefficient tabulated only for "
                      f"alpha in {{2, 4, 6}}, got {alpha}")


def _asymptotic_correction(params: SystemParams, sigma: float) -> float:
    tau = tau_alpha(params.path_loss, params.r_sd, sigma)
    return params.subcarriers * params.threshold * tau / params.snr_budget


def asymptotic_bulk_disc(params: SystemParams, density: float,
                         sigma: float) -> float:
    """High-SNR expansion of the disc bulk outage."""
    corr = _asymptotic_correction(params, sigma)
    if corr >= 1:
        warnings.warn("outside the asymptotic validity region "
                      f"(K*s*tau/(P_t/N_0) = {corr:.3g} >= 1)", stacklevel=2)
    return math.exp(-density * math.pi * sigma**2 * (1.0 - corr))


def asymptotic_ps_disc(params: SystemParams, density: float,
                       sigma: float) -> float:
    """High-SNR expansion of the disc per-subcarrier outage.

    Returned raw: outside the asymptotic region the expression can leave
    [floor, 1]; a warning flags that, nothing is clamped.
    """
    tau = tau_alpha(params.path_loss, params.r_sd, sigma)
    area = math.pi * sigma**2
    bracket = 1.0 - params.subcarriers * (
        1.0 - math.exp(density * area * params.threshold * tau
                       / params.snr_budget))
    value = math.exp(-density * area) * bracket
    floor = math.exp(-density * area)
    if not (floor <= value <= 1.0):
        warnings.warn(f"per-subcarrier asymptotic left [floor, 1] "
                      f"({value!r}); outside its validity region",
                      stacklevel=2)
    return value


def outage_floor(density: float, area: float) -> float:
    """Void probability exp(-density * area): the scheme-independent floor."""
    if not (0 < area < math.inf):
        raise ValueError("area must be finite and positive")
    if density < 0:
        raise ValueError("density must be >= 0")
    return math.exp(-density * area)


def lower_incomplete_gamma(a: float, x: float) -> float:
    """Unregularised lower incomplete gamma integral_0^x t**(a-1) e**-t dt."""
    if a <= 0:
        raise ValueError("a must be > 0")
    if x < 0:
        raise ValueError("x must be >= 0")
    return float(special.gammainc(a, x) * special.gamma(a))


def exp_integral_E(nu: float, x: float) -> float:
    """Generalised exponential integral integral_1^inf e**(-x t) / t**nu dt.

    Real order nu is supported (fractional orders (alpha-2)/alpha arise
    in the diversity bound).
    """
    if x <= 0:
        raise ValueError("x must be > 0")
    return float(mpmath.expint(nu, x))
