"""tvdlab: a laboratory for 1D scalar conservation laws.

Limiter algebra with checkable admissibility predicates, TVD finite-volume
solvers on periodic meshes, and convergence/truncation experiment drivers.
"""
from .experiments import (
    ErrorRow,
    ErrorTable,
    convergence_study,
    error_norms,
    eval_profile,
    exact_advection,
    fit_order,
    pairwise_orders,
    profile_state,
    state_for_level,
    truncation_residual,
)
from .fluxes import (
    FluxProbeReport,
    FluxSpec,
    NumericalFlux,
    advection_flux,
    burgers_flux,
    check_monotone,
    check_upwind_compliance,
    make_numerical_flux,
)
from .grid import GridState, total_variation
from .limiters import (
    CATALOG,
    AdmissibilityReport,
    LimiterSpec,
    Witness,
    check_convexity,
    check_monotonicity,
    check_quadratic_exactness,
    check_second_order_extremum,
    check_tvd_region,
    estimate_lipschitz,
    make_catalog_limiter,
    phi_values,
    psi_from_phi,
    sampling_grid,
    slope_ratio_bound,
    write_report_csv,
)
from .reconstruction import (
    UNO2,
    InterfaceValues,
    interface_values,
    reconstructed_tv,
    uno2_interface,
)
from .solver import (
    CflError,
    HartenReport,
    SchemeConfig,
    StepReport,
    advance,
    check_harten_conditions,
    incremental_coefficients,
    max_stable_sigma,
    semi_discrete_rhs,
    step,
    write_trajectory_csv,
)

__version__ = "0.1.0"

__all__ = [
    "AdmissibilityReport",
    "CATALOG",
    "CflError",
    "ErrorRow",
    "ErrorTable",
    "FluxProbeReport",
    "FluxSpec",
    "GridState",
    "HartenReport",
    "InterfaceValues",
    "LimiterSpec",
    "NumericalFlux",
    "SchemeConfig",
    "StepReport",
    "UNO2",
    "Witness",
    "advance",
    "advection_flux",
    "burgers_flux",
    "check_convexity",
    "check_harten_conditions",
    "check_monotone",
    "check_monotonicity",
    "check_quadratic_exactness",
    "check_second_order_extremum",
    "check_tvd_region",
    "check_upwind_compliance",
    "convergence_study",
    "error_norms",
    "estimate_lipschitz",
    "eval_profile",
    "exact_advection",
    "fit_order",
    "incremental_coefficients",
    "interface_values",
    "make_catalog_limiter",
    "make_numerical_flux",
    "max_stable_sigma",
    "pairwise_orders",
    "phi_values",
    "profile_state",
    "psi_from_phi",
    "reconstructed_tv",
    "sampling_grid",
    "semi_discrete_rhs",
    "slope_ratio_bound",
    "state_for_level",
    "step",
    "total_variation",
    "truncation_residual",
    "uno2_interface",
    "write_report_csv",
    "write_trajectory_csv",
]
