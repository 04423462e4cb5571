"""Numerical laboratory for pulse solutions of the quintic complex
Ginzburg-Landau equation: profiles, linearization spectra, the
skew-stabilization threshold, and time-dependent validation runs.
"""

__version__ = "0.1.0"

from .errors import ConfigError, NumericError, RegimeError
from .params import (
    ModelParams,
    NU_MIN,
    SIMPLIFIED_MU,
    kink_quantities,
)
from .grids import Grid, OperatorMatrix
from .profiles import eval_profile, front_R, ode_residual
from .operators import (
    SpectralData,
    build_A,
    build_B,
    low_spectrum,
    shrink_mode,
)
from .phase import (
    PhaseSolution,
    solve_phase,
    theta_asymptotic,
    theta1_asymptotic,
)
from .newton import Certificate, CertifiedProblem, certify_and_solve
from .ansatz import (
    AnsatzState,
    solve_pulse,
    y_for_alpha,
    triangular_solve,
)
from .stability import (
    Linearization,
    StabilityReport,
    AlphaCResult,
    ChiResult,
    assemble_D,
    restrict_state,
    small_spectrum_D,
    m11_of_state,
    m11_prediction,
    m11_expansion_check,
    da_dL_formula,
    find_alpha_c,
    alpha_c_formula,
    chi_criterion,
    linear_perturbation_flow,
    asymptotic_phase_shift,
)
from .evolution import (
    EvolutionState,
    FourierGrid,
    StabilizationResult,
    KinkSpeedResult,
    make_state,
    step,
    evolve,
    modulo_symmetry_distance,
    pulse_on_grid,
    stabilization_experiment,
    kink_speed_experiment,
    homogeneous_drift,
    alpha_sweep,
)

__all__ = [
    "__version__",
    "ConfigError", "NumericError", "RegimeError",
    "ModelParams", "NU_MIN", "SIMPLIFIED_MU", "kink_quantities",
    "Grid", "OperatorMatrix",
    "eval_profile", "front_R", "ode_residual",
    "SpectralData", "build_A", "build_B", "low_spectrum", "shrink_mode",
    "PhaseSolution", "solve_phase", "theta_asymptotic", "theta1_asymptotic",
    "Certificate", "CertifiedProblem", "certify_and_solve",
    "AnsatzState", "solve_pulse", "y_for_alpha", "triangular_solve",
    "Linearization", "StabilityReport", "AlphaCResult", "ChiResult",
    "assemble_D", "restrict_state", "small_spectrum_D",
    "m11_of_state", "m11_prediction", "m11_expansion_check",
    "da_dL_formula", "find_alpha_c", "alpha_c_formula", "chi_criterion",
    "linear_perturbation_flow", "asymptotic_phase_shift",
    "EvolutionState", "FourierGrid", "StabilizationResult",
    "KinkSpeedResult", "make_state", "step", "evolve",
    "modulo_symmetry_distance", "pulse_on_grid",
    "stabilization_experiment", "kink_speed_experiment",
    "homogeneous_drift", "alpha_sweep",
]
