"""Ball-constrained variational solver for a Schrodinger-Poisson system.

Finite differences on the unit cube with zero Dirichlet data: a conjugate
gradient Poisson solver, the coupled energy functional, empirical ball
constants, retracted Sobolev-gradient descent, and a fixed-point verifier
that certifies the minimizer as a discrete weak solution.
"""

from .ball import (
    BallSpec,
    admissible_radius,
    check_residual_bound,
    estimate_constants,
    estimation_fields,
    make_ball,
    max_forcing_norm,
)
from .energy import (
    EnergyBreakdown,
    ProblemSpec,
    directional_derivative,
    energy,
    energy_split,
    gradient_field,
    restricted_energy,
    strong_residual,
)
from .errors import (
    AssumptionViolationError,
    ConfigError,
    EstimationFailureError,
    ForcingTooLargeError,
    GridMismatchError,
    InitializationFailureError,
    InvalidExponentError,
    InvalidGridError,
    IterativeSolverError,
    OutsideBallError,
)
from .grid import (
    DomainGrid,
    ScalarField,
    apply_laplacian,
    build_grid,
    first_eigenpair,
    grad_l2_norm,
    h1_inner,
    l2_inner,
    lp_norm,
    w2n_norm,
)
from .minimize import MinimizeOptions, MinimizeResult, initial_guess, minimize, retract_to_ball
from .poisson import LinearSolveOptions, PoissonSolution, compute_phi, solve_dirichlet_poisson
from .runner import (
    ExperimentConfig,
    SolveReport,
    StudyRow,
    convergence_study,
    load_config,
    load_report,
    manufactured_poisson_error,
    run_experiment,
    write_study_csv,
)
from .sampling import ball_samples, smoothed_random_fields
from .verify import (
    VerificationReport,
    auxiliary_solve,
    closure_constant,
    coincidence_check,
    fixed_point_residual,
    pde_residual,
    phi_property_check,
    variational_inequality_check,
    verify,
)
from .version import __version__

__all__ = [
    "AssumptionViolationError",
    "BallSpec",
    "ConfigError",
    "DomainGrid",
    "EnergyBreakdown",
    "EstimationFailureError",
    "ExperimentConfig",
    "ForcingTooLargeError",
    "GridMismatchError",
    "InitializationFailureError",
    "InvalidExponentError",
    "InvalidGridError",
    "IterativeSolverError",
    "LinearSolveOptions",
    "MinimizeOptions",
    "MinimizeResult",
    "OutsideBallError",
    "PoissonSolution",
    "ProblemSpec",
    "ScalarField",
    "SolveReport",
    "StudyRow",
    "VerificationReport",
    "admissible_radius",
    "apply_laplacian",
    "auxiliary_solve",
    "ball_samples",
    "build_grid",
    "check_residual_bound",
    "closure_constant",
    "coincidence_check",
    "compute_phi",
    "convergence_study",
    "directional_derivative",
    "energy",
    "energy_split",
    "estimate_constants",
    "estimation_fields",
    "first_eigenpair",
    "fixed_point_residual",
    "grad_l2_norm",
    "gradient_field",
    "h1_inner",
    "initial_guess",
    "l2_inner",
    "load_config",
    "load_report",
    "lp_norm",
    "make_ball",
    "manufactured_poisson_error",
    "max_forcing_norm",
    "minimize",
    "pde_residual",
    "phi_property_check",
    "restricted_energy",
    "retract_to_ball",
    "run_experiment",
    "smoothed_random_fields",
    "solve_dirichlet_poisson",
    "strong_residual",
    "variational_inequality_check",
    "verify",
    "w2n_norm",
    "write_study_csv",
]
