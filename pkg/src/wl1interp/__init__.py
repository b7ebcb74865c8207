"""Interpolation of smooth-and-sparse functions via weighted l1 minimization.

Submodules:
  indexsets   -- multi-index universes, weight schemes, truncation sets
  wsparse     -- weighted norms, s-term approximations, Stechkin bounds
  bases       -- orthonormal systems, sampling matrices, Gram checks
  sampling    -- reproducible draws from the orthogonalization measures
  solvers     -- weighted l1 programs, baselines, test oracles
  analysis    -- restricted-isometry / null-space certification
  experiments -- Runge study, phase diagrams, spherical demo
  cli         -- command-line entry point
"""

__version__ = "0.1.0"

from .indexsets import IndexSet, WeightScheme, build_index_set, truncation_set
from .bases import OrthonormalSystem, SamplingMatrix, evaluate, gram_check, sampling_matrix, sup_norm_bound
from .sampling import RandomStream, SamplingMeasure, draw_points, measure_pdf
from .wsparse import (
    best_approx_oracle,
    quasi_best_approx,
    stechkin_bound,
    weighted_cardinality,
    weighted_l0,
    weighted_norm,
)
from .solvers import (
    ConstraintSpec,
    SolverResult,
    certify_optimality,
    lp_oracle_wl1,
    solve_exact,
    solve_least_squares,
    solve_wl1,
    solve_wl2,
)
from .analysis import (
    NspReport,
    RipReport,
    check_nsp_empirical,
    error_bound_check,
    rip_to_nsp_constants,
    wrip_constant,
)
from .experiments import (
    ExperimentConfig,
    MethodSpec,
    TrialResult,
    run_interpolation_trial,
    run_phase_diagram,
    run_runge_suite,
    run_spherical_demo,
    runge_preset,
    tail_eta,
    target_function,
)

__all__ = [
    "__version__",
    "IndexSet", "WeightScheme", "build_index_set", "truncation_set",
    "OrthonormalSystem", "SamplingMatrix", "evaluate", "gram_check",
    "sampling_matrix", "sup_norm_bound",
    "RandomStream", "SamplingMeasure", "draw_points", "measure_pdf",
    "weighted_norm", "weighted_l0", "weighted_cardinality",
    "quasi_best_approx", "best_approx_oracle", "stechkin_bound",
    "ConstraintSpec", "SolverResult", "solve_wl1", "lp_oracle_wl1",
    "certify_optimality", "solve_wl2", "solve_least_squares", "solve_exact",
    "RipReport", "NspReport", "wrip_constant", "rip_to_nsp_constants",
    "check_nsp_empirical", "error_bound_check",
    "ExperimentConfig", "MethodSpec", "TrialResult", "target_function",
    "tail_eta", "run_interpolation_trial", "run_runge_suite", "runge_preset",
    "run_phase_diagram", "run_spherical_demo",
]
