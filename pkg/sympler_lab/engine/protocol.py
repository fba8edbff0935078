"""Warmup / update / evaluation protocol and its continual-learning metrics."""

import logging
import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .baselines import fit_offline_ridge
from .errors import DimensionMismatchError, InvalidConfigError, InvalidSplitError
from .learner import SymplerLearner
from .types import (
    EvaluationReport,
    LearnerConfig,
    Sample,
    SplitSpec,
    StandardizationStats,
)

logger = logging.getLogger(__name__)


def rmse(predictions: Sequence[float], targets: Sequence[float]) -> float:
    """
    Root mean squared error.

    Raises:
        InvalidConfigError: If the inputs are empty or differ in length
    """
    if len(predictions) != len(targets):
        raise InvalidConfigError(
            f"Length mismatch: {len(predictions)} predictions, {len(targets)} targets"
        )
    if len(predictions) == 0:
        raise InvalidConfigError("rmse of an empty sequence")
    residuals = np.asarray(predictions, dtype=np.float64) - np.asarray(targets, dtype=np.float64)
    return float(np.sqrt(np.mean(residuals**2)))


def forgetting_ratio(loss_ww: float, loss_wu: float) -> float:
    """max(0, loss_wu - loss_ww) / loss_ww, and 0 when loss_ww is 0."""
    if loss_ww == 0:
        return 0.0
    return max(0.0, loss_wu - loss_ww) / loss_ww


def validate_split(split: SplitSpec, length: int) -> None:
    """
    Raises:
        InvalidSplitError: If the ranges are not contiguous, ordered and inside the stream
    """
    parts = [("warmup", split.warmup), ("update", split.update), ("eval", split.eval)]
    for name, r in parts:
        if r.step != 1:
            raise InvalidSplitError(f"{name} range must have step 1")
        if len(r) == 0:
            raise InvalidSplitError(f"{name} range is empty")
    if split.warmup.start != 0:
        raise InvalidSplitError("warmup must start at the first sample")
    if split.update.start != split.warmup.stop or split.eval.start != split.update.stop:
        raise InvalidSplitError("warmup, update and eval must be contiguous and ordered")
    if split.eval.stop > length:
        raise InvalidSplitError(f"Split ends at {split.eval.stop} but the stream has {length} samples")


@dataclass
class ReplayTrace:
    """Frozen predictions over one index range."""
    indices: list[int]
    predictions: list[float]
    targets: list[float]
    substituted: list[bool]


@dataclass
class ClearRun:
    """Full outcome of one protocol run."""
    report: EvaluationReport
    warmup_learner: SymplerLearner
    final_learner: SymplerLearner
    traces: dict[str, ReplayTrace] = field(default_factory=dict)


def frozen_replay(
    learner: SymplerLearner,
    stream: Sequence[Sample],
    indices: range,
) -> ReplayTrace:
    """
    Predict over stream[indices] without learning.

    The replay runs on a copy; only the naive-baseline and last-sample state
    move forward. Where the learner has no prediction, the previous target in
    the stream stands in (0.0 for the first sample).
    """
    replay = learner.frozen_copy()
    # start from the state the stream had right before the range
    if indices.start > 0:
        before = stream[indices.start - 1]
        replay.prev_y = before.y
        replay.last_sample = before
    else:
        replay.prev_y = None
        replay.last_sample = None

    trace = ReplayTrace(indices=[], predictions=[], targets=[], substituted=[])
    for i in indices:
        sample = stream[i]
        prediction = replay.predict(sample.x)
        substituted = prediction is None
        if prediction is None:
            prediction = replay.prev_y if replay.prev_y is not None else 0.0
        trace.indices.append(i)
        trace.predictions.append(prediction)
        trace.targets.append(sample.y)
        trace.substituted.append(substituted)
        replay.observe(sample.x, sample.y)
    return trace


def _trace_rmse(trace: ReplayTrace) -> float:
    return rmse(trace.predictions, trace.targets)


def execute_clear_protocol(
    stream: Sequence[Sample],
    split: SplitSpec,
    learner_cfg: Optional[LearnerConfig] = None,
) -> ClearRun:
    """
    Run the three phases and keep the intermediate learners and traces.

    1. Stream warmup through step; L_ww is a frozen replay over warmup.
    2. Stream update through step; L_wu is a frozen replay over warmup,
       fitting error a frozen replay over warmup + update.
    3. Prediction error is a frozen replay over eval.
    """
    validate_split(split, len(stream))
    n = len(stream[0].x)
    learner = SymplerLearner(n, learner_cfg or LearnerConfig())

    for i in split.warmup:
        learner.step(stream[i].x, stream[i].y)
    warmup_learner = learner.frozen_copy()
    ww = frozen_replay(warmup_learner, stream, split.warmup)

    for i in split.update:
        learner.step(stream[i].x, stream[i].y)
    final_learner = learner.frozen_copy()
    wu = frozen_replay(final_learner, stream, split.warmup)
    fit = frozen_replay(final_learner, stream, range(split.warmup.start, split.update.stop))
    pred = frozen_replay(final_learner, stream, split.eval)

    loss_ww = _trace_rmse(ww)
    loss_wu = _trace_rmse(wu)
    # a stream index counts once even when several replays cover it
    substitutions = len(
        {i for t in (ww, wu, fit, pred) for i, s in zip(t.indices, t.substituted) if s}
    )
    report = EvaluationReport(
        fitting_rmse=_trace_rmse(fit),
        prediction_rmse=_trace_rmse(pred),
        forgetting_ratio=forgetting_ratio(loss_ww, loss_wu),
        loss_ww=loss_ww,
        loss_wu=loss_wu,
        model_count=final_learner.model_count,
        sentinel_substitutions=substitutions,
    )
    logger.info(
        "protocol done fitting=%.6g prediction=%.6g forgetting=%.6g models=%d substitutions=%d",
        report.fitting_rmse, report.prediction_rmse, report.forgetting_ratio,
        report.model_count, substitutions,
    )
    return ClearRun(
        report=report,
        warmup_learner=warmup_learner,
        final_learner=final_learner,
        traces={"warmup": ww, "warmup_after_update": wu, "fitting": fit, "eval": pred},
    )


def run_clear_protocol(
    stream: Sequence[Sample],
    split: SplitSpec,
    learner_cfg: Optional[LearnerConfig] = None,
) -> EvaluationReport:
    return execute_clear_protocol(stream, split, learner_cfg).report


def _model_rmse(predict: Callable[[np.ndarray], float], stream: Sequence[Sample], indices: range) -> float:
    return rmse([predict(stream[i].x) for i in indices], [stream[i].y for i in indices])


def run_offline_protocol(
    stream: Sequence[Sample],
    split: SplitSpec,
    lam: float = 1e-6,
) -> EvaluationReport:
    """
    Same metrics for an offline linear model trained on warmup, then refit
    on the update data alone.
    """
    validate_split(split, len(stream))
    warm = fit_offline_ridge([stream[i] for i in split.warmup], lam)
    refit = fit_offline_ridge([stream[i] for i in split.update], lam)

    loss_ww = _model_rmse(warm.predict, stream, split.warmup)
    loss_wu = _model_rmse(refit.predict, stream, split.warmup)
    return EvaluationReport(
        fitting_rmse=_model_rmse(refit.predict, stream, range(split.warmup.start, split.update.stop)),
        prediction_rmse=_model_rmse(refit.predict, stream, split.eval),
        forgetting_ratio=forgetting_ratio(loss_ww, loss_wu),
        loss_ww=loss_ww,
        loss_wu=loss_wu,
        model_count=1,
    )


def naive_rmse(stream: Sequence[Sample], indices: range) -> float:
    """RMSE of the delayed predictor over a range; the first sample predicts 0."""
    predictions = [stream[i - 1].y if i > 0 else 0.0 for i in indices]
    return rmse(predictions, [stream[i].y for i in indices])


# ============================================================================
# Standardization
# ============================================================================

def _check_stats(stream: Sequence[Sample], stats: StandardizationStats) -> tuple[np.ndarray, np.ndarray]:
    if len(stats.means) != len(stats.stds):
        raise DimensionMismatchError("Stats means and stds differ in length")
    if stream and len(stream[0].x) + 1 != len(stats.means):
        raise DimensionMismatchError(
            f"Stats cover {len(stats.means)} columns, stream has {len(stream[0].x) + 1}"
        )
    scale = np.where(stats.stds > 0, stats.stds, 1.0)
    return np.asarray(stats.means, dtype=np.float64), scale


def standardize(stream: Sequence[Sample], stats: StandardizationStats) -> list[Sample]:
    """z-score every feature and the target; zero-variance columns divide by 1."""
    means, scale = _check_stats(stream, stats)
    return [
        Sample(
            x=(s.x - means[:-1]) / scale[:-1],
            y=float((s.y - means[-1]) / scale[-1]),
            index=s.index,
        )
        for s in stream
    ]


def destandardize(stream: Sequence[Sample], stats: StandardizationStats) -> list[Sample]:
    means, scale = _check_stats(stream, stats)
    return [
        Sample(
            x=s.x * scale[:-1] + means[:-1],
            y=float(s.y * scale[-1] + means[-1]),
            index=s.index,
        )
        for s in stream
    ]


# ============================================================================
# Synthetic data
# ============================================================================

def two_regime_stream(
    seed: int = 0,
    warmup: int = 200,
    update: int = 200,
    evaluation: int = 400,
    noise: float = 0.1,
) -> list[Sample]:
    """
    Slow covariate ramp over two regimes of one piecewise-linear function.

    Warmup ramps x from 0 to 1 where y = 2x; update ramps x from 1 to 2
    where y = 5 - 3x; evaluation sweeps x back from 2 to 0.
    """
    if min(warmup, update, evaluation) < 1:
        raise InvalidConfigError("Every phase needs at least one sample")
    if noise < 0 or not math.isfinite(noise):
        raise InvalidConfigError(f"noise must be finite and >= 0, got {noise}")

    rng = np.random.default_rng(seed)
    x = np.concatenate([
        np.linspace(0.0, 1.0, warmup, endpoint=False),
        np.linspace(1.0, 2.0, update, endpoint=False),
        np.linspace(2.0, 0.0, evaluation),
    ])
    y = np.where(x < 1.0, 2.0 * x, 5.0 - 3.0 * x) + noise * rng.standard_normal(len(x))
    return [Sample(x=np.array([xi]), y=float(yi), index=i) for i, (xi, yi) in enumerate(zip(x, y))]
