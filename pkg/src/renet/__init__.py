"""Sparse linear regression with adaptive relaxation.

The core estimator solves an elastic net path, then relaxes the penalty on
the selected active set by a factor theta chosen jointly with lambda by
K-fold cross-validation. Safeguards (saturation, a complexity floor on
theta) keep the relaxation stable when the active set approaches the
sample size or p far exceeds n. An adaptive elastic net baseline, synthetic
scenario generators and a benchmark CLI round out the toolkit.
"""

from .adaptive import (
    AenConfig,
    AenFit,
    adaptive_weights,
    aen_fit,
    aen_fit_model,
    ridge_pilot_cv,
    ridge_solve,
)
from .analytic import (
    closed_form_renet,
    grouping_bound,
    orthogonal_design,
    recovery_ratio,
    stabilized_objective,
)
from .bench import (
    BenchRow,
    SummaryRow,
    aggregate_report,
    desk_spec,
    load_csv,
    run_benchmark,
    write_outputs,
)
from .config import (
    BenchConfig,
    ConfigError,
    default_config,
    load_schema,
    serialize,
    validate_config,
)
from .crossval import (
    DEFAULT_THETA_GRID,
    CvSurface,
    FittedModel,
    GridSpec,
    Selection,
    SelectionRule,
    fit_final,
    fit_model,
    make_grid,
    pooled_se,
    run_cv,
    run_cv_en,
    select_cv_min,
    select_one_se,
)
from .model import (
    CoefVector,
    Dataset,
    DegenerateDataError,
    FitMetrics,
    Hyperparams,
    make_dataset,
    r_squared,
    validate_dataset,
)
from .preprocess import (
    StandardizationParams,
    TargetEncoder,
    fit_preprocess,
    standardize_fit_transform,
    target_encode_cross_fit,
    transform_holdout,
)
from .relaxation import (
    Branch,
    RelaxedFit,
    effective_theta,
    relax_solve,
    restricted_ols,
    theta_floor,
)
from .scenarios import (
    SCENARIOS,
    ScenarioSpec,
    build_covariance,
    dump_scenario,
    sample_scenario,
    signal_support,
)
from .solver import (
    EnetFit,
    EnetPath,
    SolverConfig,
    check_kkt,
    default_lambda_grid,
    enet_objective,
    enet_path,
    fit_enet,
    lambda_max,
    soft_threshold,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # model
    "Dataset",
    "Hyperparams",
    "CoefVector",
    "FitMetrics",
    "DegenerateDataError",
    "make_dataset",
    "validate_dataset",
    "r_squared",
    # solver
    "SolverConfig",
    "EnetFit",
    "EnetPath",
    "soft_threshold",
    "lambda_max",
    "default_lambda_grid",
    "enet_objective",
    "fit_enet",
    "enet_path",
    "check_kkt",
    # relaxation
    "Branch",
    "RelaxedFit",
    "theta_floor",
    "effective_theta",
    "restricted_ols",
    "relax_solve",
    # analytic forms
    "closed_form_renet",
    "recovery_ratio",
    "grouping_bound",
    "stabilized_objective",
    "orthogonal_design",
    # preprocessing
    "StandardizationParams",
    "TargetEncoder",
    "standardize_fit_transform",
    "target_encode_cross_fit",
    "transform_holdout",
    "fit_preprocess",
    # cross-validation
    "DEFAULT_THETA_GRID",
    "GridSpec",
    "CvSurface",
    "Selection",
    "SelectionRule",
    "make_grid",
    "run_cv",
    "run_cv_en",
    "select_cv_min",
    "select_one_se",
    "pooled_se",
    "FittedModel",
    "fit_model",
    "fit_final",
    # adaptive elastic net
    "AenConfig",
    "AenFit",
    "ridge_solve",
    "ridge_pilot_cv",
    "adaptive_weights",
    "aen_fit_model",
    "aen_fit",
    # scenarios
    "ScenarioSpec",
    "SCENARIOS",
    "build_covariance",
    "signal_support",
    "sample_scenario",
    "dump_scenario",
    # config
    "ConfigError",
    "BenchConfig",
    "load_schema",
    "validate_config",
    "default_config",
    "serialize",
    # benchmark
    "BenchRow",
    "SummaryRow",
    "load_csv",
    "desk_spec",
    "run_benchmark",
    "aggregate_report",
    "write_outputs",
]
