"""Type definitions for the SyMPLER engine."""

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Optional

import numpy as np
from numpy.typing import NDArray

FloatArray = NDArray[np.float64]


class Selection(str, Enum):
    """Strategy used to turn the local models into one prediction."""
    NEAREST = "nearest"
    AGGREGATED = "aggregated"
    ERROR_BASED = "error_based"


class CompareMode(str, Enum):
    """Order of the buffer update and the discard comparison."""
    ADD_THEN_COMPARE = "add_then_compare"
    COMPARE_THEN_ADD = "compare_then_add"


# ============================================================================
# VC bounds
# ============================================================================

@dataclass(frozen=True)
class BoundQuery:
    """Arguments of the VC generalization bound."""
    h: int
    l: float
    eta: float = 0.01
    a1: float = 1.0
    a2: float = 1.0
    c: float = 1.0


@dataclass(frozen=True)
class BoundSolution:
    """Minimum training size for one VC dimension."""
    h: int
    l_star: float  # bisection root of epsilon = 1, unrounded
    l_rule: int    # closed-form buffer rule with n = h - 1


# ============================================================================
# Learner
# ============================================================================

@dataclass(frozen=True)
class Sample:
    """One observation of the stream."""
    x: FloatArray
    y: float
    index: int = 0


@dataclass
class LocalModel:
    """One hidden unit: an affine model valid around its approximation point."""
    weights: FloatArray  # length n + 1, bias last
    point: FloatArray    # length n
    created_at: int = 0
    lambda_used: float = 1e-6

    def output(self, x: FloatArray) -> float:
        return float(self.weights[:-1] @ x + self.weights[-1])


@dataclass
class NoveltyBuffer:
    """Candidate training set for the next local model."""
    capacity: int
    samples: list[Sample] = field(default_factory=list)
    sum_net_err: float = 0.0
    sum_base_err: float = 0.0

    @property
    def active(self) -> bool:
        return bool(self.samples)

    def clear(self) -> None:
        self.samples = []
        self.sum_net_err = 0.0
        self.sum_base_err = 0.0


@dataclass(frozen=True)
class LearnerConfig:
    """Hyperparameters of a SyMPLER learner."""
    lam: float = 1e-6
    selection: Selection = Selection.NEAREST
    sigma: float = 1.0
    compare_mode: CompareMode = CompareMode.ADD_THEN_COMPARE


@dataclass(frozen=True)
class StepOutcome:
    """What happened while one sample was streamed through the learner."""
    prediction: Optional[float]
    baseline: Optional[float]
    model_added: bool
    buffer_len: int


@dataclass(frozen=True)
class Explanation:
    """The local model that answers a query: its point, weights and distance."""
    model_index: int
    point: FloatArray
    weights: FloatArray
    distance: float

    def to_dict(self) -> dict[str, Any]:
        return {
            "model_index": self.model_index,
            "point": [float(v) for v in self.point],
            "weights": [float(v) for v in self.weights],
            "distance": self.distance,
        }


# ============================================================================
# Pendulum lab
# ============================================================================

@dataclass(frozen=True)
class PendulumConfig:
    """Undamped pendulum and sampling setup."""
    rod: float = 0.5          # m
    g: float = 9.81           # m/s^2
    dt: float = 1.0 / 200.0   # s
    theta0: float = math.pi / 2
    omega0: float = 0.0
    cycles: float = 2.0


@dataclass(frozen=True)
class PendulumRecord:
    """One sampled instant of the pendulum."""
    t: float
    theta: float
    omega: float
    v_est: float
    a_est: float


@dataclass(frozen=True)
class TaylorLine:
    """First-order expansion of the pendulum acceleration around theta0."""
    theta0: float
    slope: float
    bias: float


@dataclass(frozen=True)
class TaylorGap:
    """Distance between one local model and the Taylor line at its point."""
    model_index: int
    point: float
    slope: float
    bias: float
    taylor_slope: float
    taylor_bias: float

    @property
    def d_slope(self) -> float:
        return abs(self.slope - self.taylor_slope)

    @property
    def d_bias(self) -> float:
        return abs(self.bias - self.taylor_bias)


@dataclass
class BaseReport:
    """Result of streaming the training cycles of the pendulum."""
    model_count: int
    per_step_sq_err: list[float]  # NaN where the network had no prediction
    model_count_trace: list[int]
    inputs: list[float]
    times: list[float]
    taylor_gaps: list[TaylorGap]
    half_cycle_counts: list[int]
    period: float


@dataclass
class ForecastReport:
    """Closed-loop long-term forecast of a frozen model against the truth."""
    times: list[float]
    theta_true: list[float]
    theta_model: list[float]
    theta_linear: list[float]
    rmse_final_model: float
    rmse_final_linear: float
    linear_period_ratio: float  # true period / linearized period


@dataclass
class DriftReport:
    """Result of the rod-length concept-drift experiment."""
    inputs: list[float]
    per_step_sq_err: list[float]
    model_count_trace: list[int]
    switch_index: int
    models_added_after_switch: int
    new_points_in_old_range: int
    pre_switch_settled_mse: float
    post_switch_peak_sq_err: float
    final_half_cycle_mse: float


@dataclass(frozen=True)
class HighDimRow:
    """Averages over repetitions for one number of spurious inputs."""
    extra_dims: int
    mean_model_count: float
    std_model_count: float
    mean_test_mse: float
    std_test_mse: float


@dataclass
class HighDimReport:
    rows: list[HighDimRow]


@dataclass(frozen=True)
class NoiseRow:
    """Averages over repetitions for one noise level and regularization."""
    noise_sigma: float
    lam: float
    mean_distance: float
    std_distance: float
    mean_model_count: float


@dataclass
class NoiseReport:
    rows: list[NoiseRow]


# ============================================================================
# Evaluation protocol and data
# ============================================================================

@dataclass(frozen=True)
class SplitSpec:
    """Contiguous warmup, update and evaluation index ranges."""
    warmup: range
    update: range
    eval: range

    @classmethod
    def from_lengths(cls, warmup: int, update: int, total: int) -> "SplitSpec":
        return cls(
            warmup=range(0, warmup),
            update=range(warmup, warmup + update),
            eval=range(warmup + update, total),
        )


@dataclass(frozen=True)
class EvaluationReport:
    """The three continual-learning metrics plus their intermediate losses."""
    fitting_rmse: float
    prediction_rmse: float
    forgetting_ratio: float
    loss_ww: float
    loss_wu: float
    model_count: int
    sentinel_substitutions: int = 0


@dataclass(frozen=True)
class DatasetSchema:
    """Which CSV columns feed the learner."""
    feature_columns: list[str]
    target_column: str
    has_timestamp: bool = False
    timestamp_column: Optional[str] = None


@dataclass(frozen=True)
class StandardizationStats:
    """Per-column means and population stds, features first, target last."""
    means: FloatArray
    stds: FloatArray


@dataclass
class RunManifest:
    """Everything needed to reproduce one CLI run."""
    subcommand: str
    flags: dict[str, Any]
    seed: int
    version: str
