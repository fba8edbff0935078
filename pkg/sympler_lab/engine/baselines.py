"""Reference predictors: naive delay, offline ridge and the linearized pendulum."""

from collections.abc import Sequence
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DimensionMismatchError, InvalidConfigError
from .learner import fit_local_model
from .types import FloatArray, Sample


@dataclass
class NaivePredictor:
    """Delayed predictor: the next target equals the last observed one."""
    prev_y: Optional[float] = None

    def step(self, y: float) -> Optional[float]:
        """Return the current prediction, then remember y."""
        prediction = self.prev_y
        self.prev_y = float(y)
        return prediction


def naive_step(p: NaivePredictor, y: float) -> Optional[float]:
    return p.step(y)


@dataclass
class OfflineRidge:
    """Single affine model fitted once on a batch and never updated."""
    weights: FloatArray  # length n + 1, bias last
    lam: float

    @property
    def n_features(self) -> int:
        return len(self.weights) - 1

    def predict(self, x: Sequence[float] | FloatArray) -> float:
        arr = np.asarray(x, dtype=np.float64).reshape(-1)
        if arr.shape[0] != self.n_features:
            raise DimensionMismatchError(
                f"Expected {self.n_features} features, got {arr.shape[0]}"
            )
        return float(self.weights[:-1] @ arr + self.weights[-1])


def fit_offline_ridge(samples: Sequence[Sample], lam: float = 1e-6) -> OfflineRidge:
    """Ridge fit over the whole batch with the local-model solver."""
    model = fit_local_model(samples, lam)
    return OfflineRidge(weights=model.weights, lam=lam)


def linearized_pendulum_accel(theta: float, g: float, rod: float) -> float:
    """Small-angle acceleration -(g/rod) * theta."""
    if rod <= 0:
        raise InvalidConfigError(f"rod must be > 0, got {rod}")
    return -(g / rod) * theta
