"""Outage, throughput and relay-selection analysis for two-hop OFDM
networks whose decode-and-forward relays form a homogeneous Poisson
point process.

Two parallel evaluation paths are provided for every outage quantity:
Monte Carlo simulation (`simulation`) and adaptive-quadrature analytics
(`analytic`), with scheme-comparison metrics (`metrics`), subcarrier
optimisation (`optimize`) and a sweep CLI (`cli`) on top.
"""

from .analytic import (
    DEFAULT_QUADRATURE,
    DomainError,
    NumericalInstabilityError,
    QuadratureError,
    QuadratureSettings,
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
from .channel import (
    FadingRealization,
    SystemParams,
    draw_fading,
    e2e_cdf,
    end_to_end_snr,
    snr_matrix,
)
from .geometry import (
    ConfigurationError,
    InfiniteAreaError,
    Region,
    RelayPoint,
    Topology,
    default_truncation_radius,
    region_area,
    relay_dest_distance,
    sample_topology,
)
from .metrics import (
    DiversityEstimate,
    MinDensityResult,
    OutageUnderflowError,
    RatioResult,
    appendix_bound_T1,
    delta_k,
    diversity_slope,
    min_density_for_advantage,
    outage_ratio,
    outage_ratio_approx,
)
from .optimize import (
    OptimizationResult,
    UnboundedOptimumError,
    cutoff_density,
    cutoff_density_freespace,
    optimize_K_constrained,
    optimize_K_unconstrained,
    throughput,
)
from .simulation import (
    NoCandidateError,
    OutageEstimate,
    Scheme,
    SelectionOutcome,
    estimate_outage,
    estimate_outage_both,
    estimate_throughput,
    select_bulk,
    select_per_subcarrier,
    trial_outage,
    trial_rng,
)

__version__ = "0.1.0"
