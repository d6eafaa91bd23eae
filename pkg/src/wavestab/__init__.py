"""Explicit finite-difference schemes for u_t + a u_x = 0 and their stability."""

from wavestab.core import (
    ConsistencyWarning,
    CustomScheme,
    Field,
    Gaussian,
    Grid1D,
    RandomIC,
    RunConfig,
    Scheme,
    SineMode,
    Stencil,
    build_stencil,
    custom_stencil,
    initial_field,
    l2_norm,
    linf_norm,
)
from wavestab.von_neumann import (
    CornerCheckResult,
    ModeSpec,
    StabilityReport,
    Verdict,
    amplification_factor,
    classify_stability,
    corner_check,
    critical_courant,
    max_amplification,
    stability_interval,
)
from wavestab.simulate import (
    SimulationRecord,
    apply_step,
    empirical_amplification,
    evolve_error,
    exact_solution,
    run_simulation,
)

__all__ = [
    "ConsistencyWarning",
    "CornerCheckResult",
    "CustomScheme",
    "Field",
    "Gaussian",
    "Grid1D",
    "ModeSpec",
    "RandomIC",
    "RunConfig",
    "Scheme",
    "SimulationRecord",
    "SineMode",
    "StabilityReport",
    "Stencil",
    "Verdict",
    "amplification_factor",
    "apply_step",
    "build_stencil",
    "classify_stability",
    "corner_check",
    "critical_courant",
    "custom_stencil",
    "empirical_amplification",
    "evolve_error",
    "exact_solution",
    "initial_field",
    "l2_norm",
    "linf_norm",
    "max_amplification",
    "run_simulation",
    "stability_interval",
]

__version__ = "0.1.0"
