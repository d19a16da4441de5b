"""Penalized GLM regularization paths with information-criterion tuning."""

from .data import (
    Dataset,
    RawTable,
    accuracy_profile,
    destandardize_coef,
    load_matrix,
    oracle_profile,
    standardize,
)
from .families import Family, cumulant, deviance, log_likelihood, make_family, mean_vector
from .penalties import (
    PenaltySpec,
    penalty_derivative,
    penalty_derivative_at_zero,
    penalty_value,
    scalar_threshold_update,
)
from .solver import (
    Fit,
    compute_lambda_max,
    fit_adaptive_lasso,
    fit_penalized,
    kkt_residuals,
)
from .path import (
    CRITERIA,
    PathFit,
    SelectionReport,
    build_lambda_grid,
    complexity_constant,
    determine_lambda_min,
    fit_path,
    select_model,
    support_cap_for,
)
from .diagnostics import (
    DiagnosticsContext,
    RestrictedFit,
    delta_min,
    gic_star_value,
    kl_divergence,
    make_context,
    population_minimizer,
    projection_quadform,
    restricted_mle,
    verify_gaussian_deviance_identity,
)
from .simulate import (
    SimDesign,
    SimReport,
    beta0_schedule,
    classify_support,
    dimension_schedule,
    gen_dataset,
    model_error,
    run_study,
    sparsity_schedule,
)
from .estimator import PenalizedGLM

__version__ = "0.1.0"

__all__ = [
    "Dataset",
    "RawTable",
    "Family",
    "PenaltySpec",
    "Fit",
    "PathFit",
    "SelectionReport",
    "DiagnosticsContext",
    "RestrictedFit",
    "SimDesign",
    "SimReport",
    "PenalizedGLM",
    "CRITERIA",
    "accuracy_profile",
    "beta0_schedule",
    "build_lambda_grid",
    "classify_support",
    "complexity_constant",
    "compute_lambda_max",
    "cumulant",
    "delta_min",
    "destandardize_coef",
    "determine_lambda_min",
    "deviance",
    "dimension_schedule",
    "fit_adaptive_lasso",
    "fit_path",
    "fit_penalized",
    "gen_dataset",
    "gic_star_value",
    "kkt_residuals",
    "kl_divergence",
    "load_matrix",
    "log_likelihood",
    "make_context",
    "make_family",
    "mean_vector",
    "model_error",
    "oracle_profile",
    "penalty_derivative",
    "penalty_derivative_at_zero",
    "penalty_value",
    "population_minimizer",
    "projection_quadform",
    "restricted_mle",
    "run_study",
    "scalar_threshold_update",
    "select_model",
    "sparsity_schedule",
    "standardize",
    "support_cap_for",
    "verify_gaussian_deviance_identity",
]
