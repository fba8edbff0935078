"""SyMPLER learner, reference baselines and experiment drivers."""

from .baselines import (
    NaivePredictor,
    OfflineRidge,
    fit_offline_ridge,
    linearized_pendulum_accel,
    naive_step,
)
from .errors import (
    BoundDomainError,
    BracketError,
    DataFormatError,
    DimensionMismatchError,
    EmptyModelError,
    InvalidConfigError,
    InvalidSplitError,
    NonFiniteInputError,
    SnapshotError,
    SymplerError,
)
from .learner import SymplerLearner, fit_local_model
from .protocol import (
    destandardize,
    forgetting_ratio,
    naive_rmse,
    rmse,
    run_clear_protocol,
    run_offline_protocol,
    standardize,
    two_regime_stream,
)
from .types import (
    CompareMode,
    EvaluationReport,
    Explanation,
    LearnerConfig,
    LocalModel,
    PendulumConfig,
    Sample,
    Selection,
    SplitSpec,
    StandardizationStats,
)
from .vc_bounds import VCBoundCalculator

__all__ = [
    "BoundDomainError",
    "BracketError",
    "CompareMode",
    "DataFormatError",
    "DimensionMismatchError",
    "EmptyModelError",
    "EvaluationReport",
    "Explanation",
    "InvalidConfigError",
    "InvalidSplitError",
    "LearnerConfig",
    "LocalModel",
    "NaivePredictor",
    "NonFiniteInputError",
    "OfflineRidge",
    "PendulumConfig",
    "Sample",
    "Selection",
    "SnapshotError",
    "SplitSpec",
    "StandardizationStats",
    "SymplerError",
    "SymplerLearner",
    "VCBoundCalculator",
    "destandardize",
    "fit_local_model",
    "fit_offline_ridge",
    "forgetting_ratio",
    "linearized_pendulum_accel",
    "naive_rmse",
    "naive_step",
    "rmse",
    "run_clear_protocol",
    "run_offline_protocol",
    "standardize",
    "two_regime_stream",
]
