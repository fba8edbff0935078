"""Tests for the SyMPLER learner."""

import math

import numpy as np
import pytest

from sympler_lab.engine.errors import (
    DimensionMismatchError,
    EmptyModelError,
    InvalidConfigError,
    NonFiniteInputError,
)
from sympler_lab.engine.learner import SymplerLearner, fit_local_model
from sympler_lab.engine.protocol import two_regime_stream
from sympler_lab.engine.types import (
    CompareMode,
    LearnerConfig,
    LocalModel,
    Sample,
    Selection,
    StandardizationStats,
)


def _model(slope: float, bias: float, point: float, created_at: int = 0) -> LocalModel:
    return LocalModel(
        weights=np.array([slope, bias]), point=np.array([point]), created_at=created_at
    )


def _sine_stream(length: int = 600) -> list[tuple[np.ndarray, float]]:
    t = np.arange(length)
    x = 1.5 * np.sin(0.03 * t)
    return [(np.array([xi]), float(np.sin(2 * xi))) for xi in x]


class TestFitLocalModel:
    """Test suite for the ridge fit of one local model."""

    def test_exact_line(self):
        """Test recovery of y = 2x + 1 and the mean point."""
        samples = [Sample(np.array([0.0]), 1.0), Sample(np.array([1.0]), 3.0), Sample(np.array([2.0]), 5.0)]
        model = fit_local_model(samples, 1e-6)
        assert model.weights == pytest.approx([2.0, 1.0], abs=1e-4)
        assert model.point == pytest.approx([1.0])

    def test_single_sample_interpolates(self):
        """Test that one sample is reproduced at its own input."""
        model = fit_local_model([Sample(np.array([0.7]), 2.3)], 1e-6)
        assert model.output(np.array([0.7])) == pytest.approx(2.3, abs=1e-3)

    def test_matches_explicit_inverse(self):
        """Test against an explicit inverse of the regularized normal matrix."""
        rng = np.random.default_rng(42)
        for _ in range(100):
            n = int(rng.integers(1, 11))
            m = int(rng.integers(max(5, n + 2), 31))
            lam = float(rng.choice([1e-6, 1.0, 15.0]))
            X = rng.standard_normal((m, n))
            Y = rng.standard_normal(m)
            model = fit_local_model([Sample(X[i], Y[i]) for i in range(m)], lam)

            Xb = np.hstack([X, np.ones((m, 1))])
            reference = np.linalg.inv(Xb.T @ Xb + lam * np.eye(n + 1)) @ (Xb.T @ Y)
            rel = np.linalg.norm(model.weights - reference) / np.linalg.norm(reference)
            assert rel < 1e-8

    def test_converges_to_hyperplane(self):
        """Test that a tiny lambda recovers noiseless hyperplane coefficients."""
        rng = np.random.default_rng(3)
        X = rng.uniform(-1, 1, size=(20, 2))
        Y = 1.5 * X[:, 0] - 2.0 * X[:, 1] + 0.3
        model = fit_local_model([Sample(X[i], Y[i]) for i in range(20)], 1e-10)
        assert model.weights == pytest.approx([1.5, -2.0, 0.3], abs=1e-5)

    def test_duplicate_features_stay_finite(self):
        """Test that regularization keeps collinear inputs solvable."""
        samples = [Sample(np.array([t, t]), 2 * t) for t in np.linspace(0, 1, 10)]
        model = fit_local_model(samples, 1e-6)
        assert np.all(np.isfinite(model.weights))

    def test_invalid_inputs_raise(self):
        """Test empty input, bad lambda, mixed dimensions and NaN."""
        with pytest.raises(InvalidConfigError):
            fit_local_model([], 1e-6)
        with pytest.raises(InvalidConfigError):
            fit_local_model([Sample(np.array([1.0]), 1.0)], 0.0)
        with pytest.raises(DimensionMismatchError):
            fit_local_model([Sample(np.array([1.0]), 1.0), Sample(np.array([1.0, 2.0]), 1.0)], 1e-6)
        with pytest.raises(NonFiniteInputError):
            fit_local_model([Sample(np.array([math.nan]), 1.0)], 1e-6)


class TestSelection:
    """Test suite for the three selection strategies."""

    def test_empty_learner_has_no_prediction(self):
        """Test the no-prediction sentinel."""
        assert SymplerLearner(1).predict([0.5]) is None

    def test_nearest_picks_closest_point(self):
        """Test that x = 3 is answered by the model at 0, not at 10."""
        learner = SymplerLearner.from_models(
            1, LearnerConfig(), [_model(1.0, 0.0, 0.0), _model(-1.0, 5.0, 10.0)]
        )
        assert learner.select_index([3.0]) == 0
        assert learner.predict([3.0]) == pytest.approx(3.0)

    def test_nearest_tie_goes_to_oldest(self):
        """Test the lowest index wins an exact tie."""
        learner = SymplerLearner.from_models(
            1, LearnerConfig(), [_model(1.0, 0.0, 0.0), _model(-1.0, 5.0, 10.0)]
        )
        assert learner.select_index([5.0]) == 0

    def test_nearest_invariant_under_translation(self):
        """Test that shifting points and queries together keeps the choice."""
        rng = np.random.default_rng(0)
        points = rng.standard_normal((6, 2))
        shift = np.array([3.5, -7.25])
        models = [LocalModel(np.zeros(3), p) for p in points]
        shifted = [LocalModel(np.zeros(3), p + shift) for p in points]
        a = SymplerLearner.from_models(2, LearnerConfig(), models)
        b = SymplerLearner.from_models(2, LearnerConfig(), shifted)
        for x in rng.standard_normal((50, 2)):
            assert a.select_index(x) == b.select_index(x + shift)

    @pytest.mark.parametrize("sigma", [0.1, 1.0, 10.0])
    def test_aggregated_equidistant_weights(self, sigma):
        """Test equal weights for equidistant models."""
        learner = SymplerLearner.from_models(
            1,
            LearnerConfig(selection=Selection.AGGREGATED, sigma=sigma),
            [_model(1.0, 0.0, 0.0), _model(2.0, 0.0, 2.0)],
        )
        assert learner.aggregation_weights([1.0]) == pytest.approx([0.5, 0.5])

    def test_aggregated_exponential_weights(self):
        """Test exp(-sigma d) weights for distances (0, 1)."""
        learner = SymplerLearner.from_models(
            1,
            LearnerConfig(selection=Selection.AGGREGATED, sigma=1.0),
            [_model(1.0, 0.0, 0.0), _model(2.0, 0.0, 1.0)],
        )
        alphas = learner.aggregation_weights([0.0])
        assert alphas == pytest.approx([0.7311, 0.2689], abs=1e-4)
        assert learner.predict([0.0]) == pytest.approx(0.0)
        assert learner.predict([0.5]) == pytest.approx(0.5 * 0.5 + 0.5 * 1.0)

    def test_aggregated_weights_are_convex(self):
        """Test non-negative weights summing to one."""
        rng = np.random.default_rng(1)
        models = [LocalModel(rng.standard_normal(3), rng.standard_normal(2)) for _ in range(7)]
        learner = SymplerLearner.from_models(
            2, LearnerConfig(selection=Selection.AGGREGATED, sigma=0.5), models
        )
        for x in rng.standard_normal((20, 2)):
            alphas = learner.aggregation_weights(x)
            assert np.all(alphas >= 0)
            assert abs(alphas.sum() - 1.0) < 1e-12

    def test_aggregated_tends_to_nearest(self):
        """Test that a large decay rate reproduces nearest selection."""
        models = [_model(1.0, 0.0, 0.0), _model(-3.0, 2.0, 1.0)]
        sharp = SymplerLearner.from_models(
            1, LearnerConfig(selection=Selection.AGGREGATED, sigma=1000.0), models
        )
        nearest = SymplerLearner.from_models(1, LearnerConfig(), models)
        assert sharp.predict([0.2]) == pytest.approx(nearest.predict([0.2]), abs=1e-9)

    def test_error_based_uses_last_sample(self):
        """Test selection by the smallest error on the most recent sample."""
        learner = SymplerLearner.from_models(
            1,
            LearnerConfig(selection=Selection.ERROR_BASED),
            [_model(1.0, 0.0, 0.0), _model(2.0, 0.0, 10.0)],
        )
        learner.observe([1.0], 2.0)  # model 1 is exact here
        assert learner.select_index([0.0]) == 1
        assert learner.predict([0.5]) == pytest.approx(1.0)

    def test_error_based_falls_back_to_nearest(self):
        """Test nearest selection before any sample was observed."""
        learner = SymplerLearner.from_models(
            1,
            LearnerConfig(selection=Selection.ERROR_BASED),
            [_model(1.0, 0.0, 0.0), _model(2.0, 0.0, 10.0)],
        )
        assert learner.select_index([9.0]) == 1

    def test_dimension_mismatch_raises(self):
        """Test that a wrong input length raises."""
        with pytest.raises(DimensionMismatchError):
            SymplerLearner(2).predict([1.0])


class TestStep:
    """Test suite for the streaming update."""

    @pytest.mark.parametrize("mode", list(CompareMode))
    def test_first_model_at_sample_14(self, mode):
        """Test the buffer fills from index 1 and closes at index 14."""
        learner = SymplerLearner(1, LearnerConfig(compare_mode=mode))
        outcomes = [learner.step([x], x * x) for x in np.linspace(0, 1, 20)]
        added = [i for i, o in enumerate(outcomes) if o.model_added]
        assert added[0] == 14
        assert outcomes[0].buffer_len == 0
        assert outcomes[13].buffer_len == 13
        assert learner.models[0].created_at == 14

    def test_first_sample_only_seeds_baseline(self):
        """Test the first outcome has neither prediction nor baseline."""
        outcome = SymplerLearner(1).step([0.0], 3.0)
        assert outcome.prediction is None
        assert outcome.baseline is None
        assert not outcome.model_added

    def test_zero_series_adds_a_single_model(self):
        """Test that a perfectly predicted series never reopens the buffer."""
        learner = SymplerLearner(1)
        for x in np.linspace(-1, 1, 200):
            learner.step([x], 0.0)
        assert learner.model_count == 1
        assert not learner.buffer.active

    def test_nonzero_constant_series_keeps_adding_models(self):
        """Test that bias shrinkage loses to the exact naive value on y = 5.

        The regularized bias sits just below 5, so the network error stays
        above the zero baseline error and every full buffer becomes a model.
        """
        learner = SymplerLearner(1)
        for x in np.linspace(-1, 1, 200):
            learner.step([x], 5.0)
        assert learner.model_count > 1
        for model in learner.models:
            assert model.weights[-1] == pytest.approx(5.0, abs=1e-3)
            assert model.weights[-1] < 5.0
            assert abs(model.weights[0]) < 1e-3

    def test_two_regime_stream_adds_models(self):
        """Test that a ramp over two linear regimes creates several models."""
        learner = SymplerLearner(1)
        for s in two_regime_stream(seed=0)[:400]:
            learner.step(s.x, s.y)
        assert learner.model_count >= 2

    @pytest.mark.parametrize("mode", list(CompareMode))
    def test_buffer_sums_match_buffered_interval(self, mode):
        """Test the running sums against a recomputation over the buffer."""
        stream = _sine_stream()
        ys = [y for _, y in stream]
        learner = SymplerLearner(1, LearnerConfig(compare_mode=mode))
        checked = 0
        for x, y in stream:
            learner.step(x, y)
            buf = learner.buffer
            if learner.model_count == 0 or not buf.active:
                continue
            net = sum((s.y - learner.predict(s.x)) ** 2 for s in buf.samples)
            base = sum((s.y - ys[s.index - 1]) ** 2 for s in buf.samples)
            assert buf.sum_net_err == pytest.approx(net, rel=1e-9, abs=1e-9)
            assert buf.sum_base_err == pytest.approx(base, rel=1e-9, abs=1e-9)
            checked += 1
        assert checked > 0

    def test_buffer_never_exceeds_capacity(self):
        """Test 0 <= len(buffer) <= capacity throughout a stream."""
        learner = SymplerLearner(1)
        for x, y in _sine_stream():
            outcome = learner.step(x, y)
            assert 0 <= outcome.buffer_len <= learner.buffer.capacity

    def test_deterministic(self):
        """Test identical streams give bit-identical models."""
        a, b = SymplerLearner(1), SymplerLearner(1)
        for x, y in _sine_stream():
            a.step(x, y)
            b.step(x, y)
        assert a.model_count == b.model_count
        for ma, mb in zip(a.models, b.models):
            assert np.array_equal(ma.weights, mb.weights)
            assert np.array_equal(ma.point, mb.point)

    def test_models_from_prefix_are_never_modified(self):
        """Test stability of earlier models under any continuation."""
        stream = _sine_stream(900)
        learner = SymplerLearner(1)
        for x, y in stream[:300]:
            learner.step(x, y)
        before = [(m.weights.copy(), m.point.copy()) for m in learner.models]
        for x, y in stream[300:]:
            learner.step(x, y)
        for (w, p), model in zip(before, learner.models):
            assert np.array_equal(w, model.weights)
            assert np.array_equal(p, model.point)

    def test_invalid_target_raises(self):
        """Test that a non-finite target raises."""
        with pytest.raises(NonFiniteInputError):
            SymplerLearner(1).step([0.0], math.inf)

    def test_invalid_config_raises(self):
        """Test lambda and sigma validation."""
        with pytest.raises(InvalidConfigError):
            SymplerLearner(1, LearnerConfig(lam=0.0))
        with pytest.raises(InvalidConfigError):
            SymplerLearner(1, LearnerConfig(selection=Selection.AGGREGATED, sigma=0.0))

    def test_frozen_copy_is_independent(self):
        """Test that stepping a copy leaves the original untouched."""
        learner = SymplerLearner(1)
        for x, y in _sine_stream(100):
            learner.step(x, y)
        count = learner.model_count
        copy = learner.frozen_copy()
        for x, y in _sine_stream(300):
            copy.step(x, y)
        assert learner.model_count == count

    def test_from_models_checks_dimensions(self):
        """Test that models of the wrong size are rejected."""
        with pytest.raises(DimensionMismatchError):
            SymplerLearner.from_models(2, LearnerConfig(), [_model(1.0, 0.0, 0.0)])


class TestExplain:
    """Test suite for model explanations."""

    def test_single_model_always_selected(self):
        """Test index 0 regardless of the query."""
        learner = SymplerLearner.from_models(1, LearnerConfig(), [_model(1.0, 2.0, 0.5)])
        for x in (-10.0, 0.5, 42.0):
            assert learner.explain([x]).model_index == 0

    def test_query_at_point(self):
        """Test zero distance and the selected model's weights."""
        learner = SymplerLearner.from_models(
            1, LearnerConfig(), [_model(1.0, 2.0, 0.0), _model(-3.0, 1.0, 4.0)]
        )
        explanation = learner.explain([4.0])
        assert explanation.model_index == 1
        assert explanation.distance == 0.0
        assert explanation.weights == pytest.approx([-3.0, 1.0])

    def test_empty_learner_raises(self):
        """Test that explaining without models raises."""
        with pytest.raises(EmptyModelError):
            SymplerLearner(1).explain([0.0])

    def test_original_units(self):
        """Test weights, bias and point mapped back through the statistics."""
        learner = SymplerLearner.from_models(1, LearnerConfig(), [_model(2.0, 1.0, 0.5)])
        stats = StandardizationStats(means=np.array([10.0, 100.0]), stds=np.array([2.0, 5.0]))
        explanation = learner.explain([11.0], stats)
        assert explanation.weights == pytest.approx([5.0, 55.0])
        assert explanation.point == pytest.approx([11.0])
        assert explanation.distance == pytest.approx(0.0)
        # the original-unit line reproduces the destandardized prediction
        z = (11.0 - 10.0) / 2.0
        assert 5.0 * 11.0 + 55.0 == pytest.approx(learner.predict([z]) * 5.0 + 100.0)
