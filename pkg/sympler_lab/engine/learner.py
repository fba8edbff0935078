"""SyMPLER: a committee of local linear models grown from a novelty buffer."""

import copy
import logging
from collections.abc import Sequence
from typing import Optional

import numpy as np

from .errors import (
    DimensionMismatchError,
    EmptyModelError,
    InvalidConfigError,
    NonFiniteInputError,
)
from .types import (
    CompareMode,
    Explanation,
    FloatArray,
    LearnerConfig,
    LocalModel,
    NoveltyBuffer,
    Sample,
    Selection,
    StandardizationStats,
    StepOutcome,
)
from .vc_bounds import VCBoundCalculator

logger = logging.getLogger(__name__)


def fit_local_model(
    samples: Sequence[Sample],
    lam: float,
    created_at: int = 0,
) -> LocalModel:
    """
    Fit one affine model by ridge regression.

    Solves (Xb^T Xb + lam I) w = Xb^T Yb directly, where Xb carries a trailing
    column of ones. The bias coordinate is regularized like every other one.
    The approximation point is the mean of the sample inputs.

    Args:
        samples: Training samples, all of the same dimension
        lam: L2 regularization, > 0
        created_at: Stream index recorded on the model

    Returns:
        The fitted LocalModel

    Raises:
        InvalidConfigError: If there are no samples or lam <= 0
        DimensionMismatchError: If the samples disagree on dimension
        NonFiniteInputError: If any value is NaN or infinite
    """
    if not samples:
        raise InvalidConfigError("At least one sample is needed to fit a local model")
    if lam <= 0:
        raise InvalidConfigError(f"lambda must be > 0, got {lam}")

    n = len(samples[0].x)
    if any(len(s.x) != n for s in samples):
        raise DimensionMismatchError("All samples of a buffer must have the same dimension")

    X = np.array([s.x for s in samples], dtype=np.float64).reshape(len(samples), n)
    Y = np.array([s.y for s in samples], dtype=np.float64)
    if not (np.all(np.isfinite(X)) and np.all(np.isfinite(Y))):
        raise NonFiniteInputError("Local model training data must be finite")

    Xb = np.hstack([X, np.ones((len(samples), 1))])
    A = Xb.T @ Xb + lam * np.eye(n + 1)
    weights = np.linalg.solve(A, Xb.T @ Y)

    return LocalModel(
        weights=weights,
        point=X.mean(axis=0),
        created_at=created_at,
        lambda_used=lam,
    )


class SymplerLearner:
    """
    Continual piecewise-linear regressor.

    Keeps a growing list of local linear models, each attached to an
    approximation point. A sample whose squared error exceeds that of the
    naive predictor opens a novelty buffer; while the buffered network error
    stays above the buffered naive error, samples accumulate. A full buffer
    becomes a new local model. Existing models are never modified.
    """

    def __init__(self, n_features: int, config: Optional[LearnerConfig] = None):
        """
        Initialize an empty learner.

        Args:
            n_features: Number of input features n (bias excluded)
            config: Hyperparameters; defaults when omitted
        """
        config = config or LearnerConfig()
        if n_features < 1:
            raise InvalidConfigError(f"n_features must be >= 1, got {n_features}")
        if config.lam <= 0:
            raise InvalidConfigError(f"lambda must be > 0, got {config.lam}")
        if config.selection == Selection.AGGREGATED and config.sigma <= 0:
            raise InvalidConfigError(f"sigma must be > 0, got {config.sigma}")

        self.n_features = n_features
        self.config = config
        self.buffer = NoveltyBuffer(capacity=VCBoundCalculator.buffer_size(n_features))
        self.prev_y: Optional[float] = None
        self.last_sample: Optional[Sample] = None
        self._models: list[LocalModel] = []
        self._points = np.empty((0, n_features))
        self._weights = np.empty((0, n_features + 1))
        self._index = 0

    @classmethod
    def from_models(
        cls,
        n_features: int,
        config: LearnerConfig,
        models: Sequence[LocalModel],
    ) -> "SymplerLearner":
        """Rebuild a learner around an existing list of models."""
        learner = cls(n_features, config)
        for model in models:
            if len(model.point) != n_features or len(model.weights) != n_features + 1:
                raise DimensionMismatchError(
                    f"Model does not match n={n_features}: "
                    f"point {len(model.point)}, weights {len(model.weights)}"
                )
            learner._append_model(model)
        return learner

    @property
    def models(self) -> tuple[LocalModel, ...]:
        return tuple(self._models)

    @property
    def model_count(self) -> int:
        return len(self._models)

    def frozen_copy(self) -> "SymplerLearner":
        """Independent copy whose models and state do not follow this learner."""
        return copy.deepcopy(self)

    # ------------------------------------------------------------------
    # Prediction
    # ------------------------------------------------------------------

    def _as_input(self, x: Sequence[float] | FloatArray) -> FloatArray:
        arr = np.asarray(x, dtype=np.float64).reshape(-1)
        if arr.shape[0] != self.n_features:
            raise DimensionMismatchError(
                f"Expected {self.n_features} features, got {arr.shape[0]}"
            )
        if not np.all(np.isfinite(arr)):
            raise NonFiniteInputError("Input contains NaN or infinity")
        return arr

    def _distances(self, x: FloatArray) -> FloatArray:
        return np.linalg.norm(self._points - x, axis=1)

    def _outputs(self, x: FloatArray) -> FloatArray:
        return self._weights[:, :-1] @ x + self._weights[:, -1]

    def _nearest_index(self, x: FloatArray) -> int:
        # argmin returns the first minimum: ties go to the oldest model
        return int(np.argmin(self._distances(x)))

    def _error_based_index(self, x: FloatArray) -> int:
        if self.last_sample is None:
            return self._nearest_index(x)
        errors = np.abs(self._outputs(self.last_sample.x) - self.last_sample.y)
        return int(np.argmin(errors))

    def aggregation_weights(self, x: Sequence[float] | FloatArray) -> FloatArray:
        """Convex weights exp(-sigma * d_i) / sum_j exp(-sigma * d_j)."""
        x = self._as_input(x)
        if not self._models:
            raise EmptyModelError("Learner has no local models")
        d = self._distances(x)
        # shifting by the minimum distance leaves the normalized weights unchanged
        scores = np.exp(-self.config.sigma * (d - d.min()))
        return scores / scores.sum()

    def select_index(self, x: Sequence[float] | FloatArray) -> int:
        """Index of the model that answers x; aggregation reports the nearest one."""
        x = self._as_input(x)
        if not self._models:
            raise EmptyModelError("Learner has no local models")
        if self.config.selection == Selection.ERROR_BASED:
            return self._error_based_index(x)
        return self._nearest_index(x)

    def predict(self, x: Sequence[float] | FloatArray) -> Optional[float]:
        """
        Network output for x, or None when no local model exists yet.

        Raises:
            DimensionMismatchError: If x does not have n components
        """
        x = self._as_input(x)
        if not self._models:
            return None

        selection = self.config.selection
        if selection == Selection.AGGREGATED:
            d = self._distances(x)
            scores = np.exp(-self.config.sigma * (d - d.min()))
            alphas = scores / scores.sum()
            return float(alphas @ self._outputs(x))
        if selection == Selection.ERROR_BASED:
            i = self._error_based_index(x)
        else:
            i = self._nearest_index(x)
        return self._models[i].output(x)

    def predict_many(self, X: Sequence[Sequence[float]] | FloatArray) -> list[Optional[float]]:
        """Predict every row of X with the learner frozen."""
        return [self.predict(row) for row in X]

    def explain(
        self,
        x: Sequence[float] | FloatArray,
        stats: Optional[StandardizationStats] = None,
    ) -> Explanation:
        """
        Report the local model responsible for x.

        When stats are given, x is taken in original units, standardized for
        selection, and the point and weights are mapped back to original units.

        Raises:
            EmptyModelError: If the learner has no models
        """
        if not self._models:
            raise EmptyModelError("Cannot explain a prediction without local models")

        raw = np.asarray(x, dtype=np.float64).reshape(-1)
        if stats is None:
            z = self._as_input(raw)
            i = self.select_index(z)
            model = self._models[i]
            return Explanation(
                model_index=i,
                point=model.point.copy(),
                weights=model.weights.copy(),
                distance=float(np.linalg.norm(z - model.point)),
            )

        if len(stats.means) != self.n_features + 1:
            raise DimensionMismatchError(
                f"Stats cover {len(stats.means)} columns, expected {self.n_features + 1}"
            )
        scale = np.where(stats.stds > 0, stats.stds, 1.0)
        mu_x, s_x = stats.means[:-1], scale[:-1]
        mu_y, s_y = float(stats.means[-1]), float(scale[-1])

        z = self._as_input((self._as_input(raw) - mu_x) / s_x)
        i = self.select_index(z)
        model = self._models[i]
        w, b = model.weights[:-1], float(model.weights[-1])
        weights = np.append(s_y * w / s_x, s_y * (b - float(w @ (mu_x / s_x))) + mu_y)
        point = model.point * s_x + mu_x
        return Explanation(
            model_index=i,
            point=point,
            weights=weights,
            distance=float(np.linalg.norm(raw - point)),
        )

    # ------------------------------------------------------------------
    # Learning
    # ------------------------------------------------------------------

    def _append_model(self, model: LocalModel) -> None:
        self._models.append(model)
        self._points = np.vstack([self._points, model.point])
        self._weights = np.vstack([self._weights, model.weights])

    def observe(self, x: Sequence[float] | FloatArray, y: float) -> None:
        """Advance the naive-baseline and last-sample state without learning."""
        arr = self._as_input(x)
        self.prev_y = float(y)
        self.last_sample = Sample(x=arr, y=float(y), index=self._index)
        self._index += 1

    def step(self, x: Sequence[float] | FloatArray, y: float) -> StepOutcome:
        """
        Stream one sample through the learner.

        Predicts with the current network and the naive predictor, reveals y,
        updates the novelty buffer and trains a new local model when the
        buffer reaches its VC-theoretical capacity.

        Raises:
            DimensionMismatchError: If x does not have n components
            NonFiniteInputError: If x or y is not finite
        """
        x = self._as_input(x)
        y = float(y)
        if not np.isfinite(y):
            raise NonFiniteInputError("Target contains NaN or infinity")

        y_net = self.predict(x)
        y_base = self.prev_y
        sample = Sample(x=x.copy(), y=y, index=self._index)
        model_added = False

        # The very first sample only seeds the naive baseline.
        if y_base is not None:
            e_base = (y - y_base) ** 2
            if y_net is None:
                # no model: the network is always worse; store a finite surrogate
                e_net = np.inf
                e_net_stored = e_base + 1.0
            else:
                e_net = (y - y_net) ** 2
                e_net_stored = e_net
            self._update_buffer(sample, e_net, e_net_stored, e_base)

            if len(self.buffer.samples) >= self.buffer.capacity:
                model = fit_local_model(self.buffer.samples, self.config.lam, self._index)
                self._append_model(model)
                self.buffer.clear()
                model_added = True
                logger.info(
                    "model added index=%d count=%d point=%s",
                    self._index, len(self._models), np.array2string(model.point, precision=4),
                )

        self.prev_y = y
        self.last_sample = sample
        self._index += 1

        return StepOutcome(
            prediction=y_net,
            baseline=y_base,
            model_added=model_added,
            buffer_len=len(self.buffer.samples),
        )

    def _update_buffer(
        self,
        sample: Sample,
        e_net: float,
        e_net_stored: float,
        e_base: float,
    ) -> None:
        buf = self.buffer
        if not buf.active:
            if e_net > e_base:
                buf.samples.append(sample)
                buf.sum_net_err = e_net_stored
                buf.sum_base_err = e_base
            return

        if self.config.compare_mode == CompareMode.ADD_THEN_COMPARE:
            buf.sum_net_err += e_net_stored
            buf.sum_base_err += e_base
            count = len(buf.samples) + 1
            if buf.sum_net_err / count <= buf.sum_base_err / count:
                logger.debug("buffer discarded index=%d len=%d", sample.index, len(buf.samples))
                buf.clear()
            else:
                buf.samples.append(sample)
        else:
            count = len(buf.samples)
            if buf.sum_net_err / count <= buf.sum_base_err / count:
                logger.debug("buffer discarded index=%d len=%d", sample.index, len(buf.samples))
                buf.clear()
            else:
                buf.samples.append(sample)
                buf.sum_net_err += e_net_stored
                buf.sum_base_err += e_base
