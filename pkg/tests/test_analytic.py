import math

import numpy as np
import pytest

from relayfield import (
    DEFAULT_QUADRATURE,
    DomainError,
    NumericalInstabilityError,
    QuadratureSettings,
    Region,
    SystemParams,
    asymptotic_bulk_disc,
    asymptotic_ps_disc,
    exp_integral_E,
    integrand_H,
    log_outage_bulk,
    lower_incomplete_gamma,
    outage_bulk,
    outage_bulk_disc,
    outage_bulk_plane,
    outage_bulk_plane_freespace,
    outage_floor,
    outage_ps,
    outage_ps_disc,
    outage_ps_plane,
    outage_ps_plane_freespace,
    tau_alpha,
    u_disc,
    u_plane,
)
from relayfield.analytic import _quad


def _mc_integral(kernel, r_max, samples, seed):
    """Plain Monte Carlo oracle for the half-domain integrals.

    Integrates kernel(r, theta) over [0, r_max] x [0, pi] in chunks,
    returning the estimate and its standard error.
    """
    rng = np.random.default_rng(seed)
    total = total_sq = 0.0
    n = 0
    chunk = 2_000_000
    while n < samples:
        r = r_max * rng.random(chunk)
        theta = math.pi * rng.random(chunk)
        h = kernel(r, theta)
        total += h.sum()
        total_sq += (h * h).sum()
        n += chunk
    area = r_max * math.pi
    mean = total / n
    se = area * math.sqrt((total_sq / n - mean * mean) / n)
    return area * mean, se


def test_integrand_examples(params):
    assert integrand_H(1.0, 0.0, 0.0, params) == 0.0
    # r = 5, theta = pi/2: r_md**2 = 50
    got = integrand_H(1.0, 5.0, math.pi / 2, params)
    assert got == pytest.approx(5.0 * math.exp(-0.75), rel=1e-12)
    # scaling n doubles the exponent
    assert integrand_H(2.0, 5.0, math.pi / 2, params) == pytest.approx(
        5.0 * math.exp(-1.5), rel=1e-12)
    with pytest.raises(ValueError):
        integrand_H(1.0, -1.0, 0.0, params)


def test_u_disc_degenerate_and_monotone(params):
    # n = 0 kills the exponential, leaving the half-disc area
    assert u_disc(5.0, 0.0, params) == pytest.approx(
        math.pi * 12.5, rel=1e-10)
    values = [u_disc(5.0, n, params) for n in (0.0, 1.0, 2.0, 4.0, 8.0)]
    assert all(a > b for a, b in zip(values, values[1:]))
    with pytest.raises(ValueError):
        u_disc(0.0, 1.0, params)


def test_u_disc_against_monte_carlo(params):
    def kernel(r, theta):
        r_md2 = 25.0 + r * r - 10.0 * r * np.cos(theta)
        return r * np.exp(-0.04 * (r * r + r_md2))

    est, se = _mc_integral(kernel, 5.0, 40_000_000, seed=2024)
    quad = u_disc(5.0, 4.0, params)
    assert abs(quad - est) < max(3 * se, 1e-4 * quad)
    assert quad == pytest.approx(8.705482784086396, rel=1e-9)


def test_u_plane_against_monte_carlo():
    # alpha = 4 exercises the rational substitution away from the
    # free-space closed form; the kernel is negligible beyond r = 8
    p = SystemParams(snr_budget=100.0, path_loss=4.0, threshold=1.0,
                     subcarriers=4, r_sd=5.0)

    def kernel(r, theta):
        r_md2 = 25.0 + r * r - 10.0 * r * np.cos(theta)
        return r * np.exp(-0.01 * (r**4 + r_md2 * r_md2))

    est, se = _mc_integral(kernel, 8.0, 20_000_000, seed=77)
    quad = u_plane(1.0, p)
    assert abs(quad - est) < max(3 * se, 1e-4 * quad)
    with pytest.raises(DomainError):
        u_plane(0.0, p)


def test_bulk_outage_spot_values(params, disc):
    assert outage_bulk(params, disc, 1.0) == pytest.approx(
        2.7448191127058575e-08, rel=1e-8)
    assert outage_bulk_disc(params, 1.0, 5.0) == pytest.approx(
        math.exp(-2.0 * u_disc(5.0, 4.0, params)), rel=1e-12)
    assert log_outage_bulk(params, disc, 1.0) == pytest.approx(
        -2.0 * 8.705482784086396, rel=1e-9)


def test_ps_outage_spot_value(params):
    assert outage_ps_disc(params, 1.0, 5.0) == pytest.approx(
        1.2371493662280298e-21, rel=1e-6)


def test_zero_density_identities(params, disc):
    # no relays at all: both schemes are certainly in outage
    assert outage_bulk(params, disc, 0.0) == 1.0
    assert outage_ps(params, disc, 0.0) == pytest.approx(1.0, abs=1e-12)


def test_ps_collapses_to_bulk_for_single_subcarrier(disc):
    p = SystemParams(snr_budget=100.0, path_loss=2.0, threshold=1.0,
                     subcarriers=1, r_sd=5.0)
    for density in (0.02, 0.1, 0.5):
        assert outage_ps(p, disc, density) == pytest.approx(
            outage_bulk(p, disc, density), rel=1e-10)


def test_ps_below_bulk(params, disc):
    for density in (0.05, 0.2, 1.0):
        assert outage_ps(params, disc, density) <= outage_bulk(
            params, disc, density)


def test_plane_quadrature_matches_freespace_closed_forms(params):
    # two independent routes to the same number: adaptive quadrature
    # with the rational substitution vs the alpha = 2 closed forms
    for density in (0.05, 0.3, 1.0):
        assert outage_bulk_plane(params, density) == pytest.approx(
            outage_bulk_plane_freespace(params, density), rel=1e-10)
        assert outage_ps_plane(params, density) == pytest.approx(
            outage_ps_plane_freespace(params, density), rel=1e-8)


def test_freespace_forms_reject_other_exponents():
    p = SystemParams(snr_budget=100.0, path_loss=4.0, threshold=1.0,
                     subcarriers=4, r_sd=5.0)
    with pytest.raises(DomainError):
        outage_bulk_plane_freespace(p, 0.1)
    with pytest.raises(DomainError):
        outage_ps_plane_freespace(p, 0.1)


def test_tau_alpha_table():
    assert tau_alpha(2, 5.0, 5.0) == pytest.approx(50.0)
    assert tau_alpha(4, 5.0, 5.0) == pytest.approx(6875.0 / 3.0)
    assert tau_alpha(6, 5.0, 5.0) == pytest.approx(140625.0)
    with pytest.raises(DomainError):
        tau_alpha(3, 5.0, 5.0)


def test_asymptotics_converge_to_exact():
    rel_errors_bulk, rel_errors_ps = [], []
    for budget in (1e4, 1e6):
        p = SystemParams(snr_budget=budget, path_loss=2.0, threshold=1.0,
                         subcarriers=4, r_sd=5.0)
        exact_b = outage_bulk_disc(p, 1.0, 5.0)
        exact_p = outage_ps_disc(p, 1.0, 5.0)
        rel_errors_bulk.append(
            abs(asymptotic_bulk_disc(p, 1.0, 5.0) - exact_b) / exact_b)
        rel_errors_ps.append(
            abs(asymptotic_ps_disc(p, 1.0, 5.0) - exact_p) / exact_p)
    assert rel_errors_bulk[1] < rel_errors_bulk[0] < 0.05
    assert rel_errors_ps[1] < rel_errors_ps[0] < 0.05
    assert rel_errors_bulk[1] < 1e-5
    assert rel_errors_ps[1] < 1e-5


def test_asymptotics_warn_outside_validity(params):
    # K * s * tau / budget = 2 >= 1 at this budget
    with pytest.warns(UserWarning):
        asymptotic_bulk_disc(params, 1.0, 5.0)
    # low budget pushes the per-subcarrier expansion above 1
    p = SystemParams(snr_budget=60.0, path_loss=2.0, threshold=1.0,
                     subcarriers=4, r_sd=5.0)
    with pytest.warns(UserWarning):
        assert asymptotic_ps_disc(p, 0.05, 5.0) > 1.0


def test_outage_floor():
    assert outage_floor(0.001, math.pi * 25.0) == pytest.approx(
        math.exp(-0.025 * math.pi), rel=1e-12)
    with pytest.raises(ValueError):
        outage_floor(0.1, math.inf)
    with pytest.raises(ValueError):
        outage_floor(-0.1, 1.0)


def test_floor_lower_bounds_both_schemes(params, disc):
    floor = outage_floor(0.05, disc.area)
    assert outage_bulk(params, disc, 0.05) >= floor
    assert outage_ps(params, disc, 0.05) >= floor


def test_subcarrier_cap(disc):
    p = SystemParams(snr_budget=100.0, path_loss=2.0, threshold=1.0,
                     subcarriers=65, r_sd=5.0)
    with pytest.raises(NumericalInstabilityError):
        outage_ps(p, disc, 0.1)


def test_lower_incomplete_gamma_against_quadrature():
    for a, x in ((0.5, 1.0), (1.0, 2.0), (2.5, 0.7)):
        oracle = _quad(lambda t: t ** (a - 1) * math.exp(-t), 0.0, x,
                       DEFAULT_QUADRATURE, "gamma oracle")
        assert lower_incomplete_gamma(a, x) == pytest.approx(
            oracle, rel=1e-10)
    assert lower_incomplete_gamma(0.5, 1.0) == pytest.approx(
        1.4936482656248544, rel=1e-12)
    with pytest.raises(ValueError):
        lower_incomplete_gamma(-1.0, 1.0)


def test_exp_integral_against_quadrature():
    for nu, x in ((1.0, 1.0), (0.5, 0.3), (1.0 / 3.0, 2.0)):
        oracle = _quad(lambda t: math.exp(-x * t) / t**nu, 1.0, 200.0,
                       DEFAULT_QUADRATURE, "expint oracle")
        assert exp_integral_E(nu, x) == pytest.approx(oracle, rel=1e-8)
    assert exp_integral_E(1.0, 1.0) == pytest.approx(
        0.21938393439552029, rel=1e-12)
    with pytest.raises(ValueError):
        exp_integral_E(0.5, 0.0)


def test_quadrature_settings_validation():
    with pytest.raises(ValueError):
        QuadratureSettings(abs_tol=0.0)
    loose = QuadratureSettings(abs_tol=1e-6, rel_tol=1e-5,
                               max_subdivisions=50)
    p = SystemParams(snr_budget=100.0, path_loss=2.0, threshold=1.0,
                     subcarriers=4, r_sd=5.0)
    assert u_disc(5.0, 4.0, p, loose) == pytest.approx(
        u_disc(5.0, 4.0, p), rel=1e-5)
