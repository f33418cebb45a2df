"""Uncertainty quantification for the Darcy-flow inverse problem.

Forward PDE solver, Gaussian spectral priors, score-operator linearization,
posterior-scale asymptotics, pCN sampling and credible-interval coverage
experiments, all on the unit square with a Dirichlet sine basis.
"""

from .errors import (
    AliasingError,
    BvmUqError,
    ChainQualityError,
    CoefficientError,
    ConfigError,
    DomainError,
    GridMismatchError,
    SolverConvergenceError,
    TuningError,
)
from .grids import (
    Grid,
    GridField,
    SpectralVector,
    analyze,
    bump_psi_coeffs,
    eval_bump_psi,
    inner_product,
    l2_norm,
    synthesize,
)
from .solver import EllipticOperator, SolveConfig, assemble, solve_dirichlet
from .forward import (
    Dataset,
    ProblemSpec,
    analytic_poisson_solution,
    conductivity,
    darcy_poisson_problem,
    forward,
    grid_design,
    interpolate,
    log_likelihood,
    observe,
    uniform_design,
)
from .prior import PriorSpec, epsilon_rate, tau_star, truncation_tail_fraction
from .score import LinearizationPoint, apply_score, apply_score_adjoint, remainder
from .asymptotics import (
    AsymptoticReport,
    InfoGram,
    asymptotic_report,
    bias_b,
    build_info_gram,
    check_coverage_conditions,
    distance_function,
    perturbation,
    rate_fit,
    scale_s,
    scale_t,
    spectral_distribution,
    system_condition,
)
from .pcn import Chain, ChainConfig, make_loglik, pcn_step, run_chain, tune_beta
from .inference import (
    CoverageReport,
    CredibleInterval,
    ExperimentConfig,
    FunctionalTrace,
    build_design_matrix,
    conjugate_oracle,
    coverage_experiment,
    credible_interval,
    functional_trace,
    geyer_ess,
    wilson_interval,
)

__version__ = "0.1.0"

__all__ = [
    "AliasingError",
    "AsymptoticReport",
    "BvmUqError",
    "Chain",
    "ChainConfig",
    "ChainQualityError",
    "CoefficientError",
    "ConfigError",
    "CoverageReport",
    "CredibleInterval",
    "Dataset",
    "DomainError",
    "EllipticOperator",
    "ExperimentConfig",
    "FunctionalTrace",
    "Grid",
    "GridField",
    "GridMismatchError",
    "InfoGram",
    "LinearizationPoint",
    "PriorSpec",
    "ProblemSpec",
    "SolveConfig",
    "SolverConvergenceError",
    "SpectralVector",
    "TuningError",
    "analytic_poisson_solution",
    "analyze",
    "apply_score",
    "apply_score_adjoint",
    "assemble",
    "asymptotic_report",
    "bias_b",
    "build_design_matrix",
    "build_info_gram",
    "bump_psi_coeffs",
    "check_coverage_conditions",
    "conductivity",
    "conjugate_oracle",
    "coverage_experiment",
    "credible_interval",
    "darcy_poisson_problem",
    "distance_function",
    "epsilon_rate",
    "eval_bump_psi",
    "forward",
    "functional_trace",
    "geyer_ess",
    "grid_design",
    "inner_product",
    "interpolate",
    "l2_norm",
    "log_likelihood",
    "make_loglik",
    "observe",
    "pcn_step",
    "perturbation",
    "rate_fit",
    "remainder",
    "run_chain",
    "scale_s",
    "scale_t",
    "solve_dirichlet",
    "spectral_distribution",
    "synthesize",
    "system_condition",
    "tau_star",
    "truncation_tail_fraction",
    "tune_beta",
    "uniform_design",
    "wilson_interval",
]
