"""Tests for the warmup/update/evaluation protocol."""

import math

import numpy as np
import pytest

from sympler_lab.engine.errors import (
    DimensionMismatchError,
    InvalidConfigError,
    InvalidSplitError,
)
from sympler_lab.engine.learner import SymplerLearner
from sympler_lab.engine.protocol import (
    destandardize,
    execute_clear_protocol,
    forgetting_ratio,
    frozen_replay,
    naive_rmse,
    rmse,
    run_clear_protocol,
    run_offline_protocol,
    standardize,
    two_regime_stream,
)
from sympler_lab.engine.types import Sample, SplitSpec, StandardizationStats


@pytest.fixture
def stream():
    """Two-regime ramp: 200 warmup, 200 update and 400 evaluation samples."""
    return two_regime_stream(seed=1)


@pytest.fixture
def split(stream):
    return SplitSpec.from_lengths(200, 200, len(stream))


class TestMetrics:
    """Test suite for RMSE and the forgetting ratio."""

    def test_rmse_identical(self):
        assert rmse([1.0, 2.0], [1.0, 2.0]) == 0.0

    def test_rmse_residuals(self):
        """Test residuals (3, 4) give sqrt(12.5)."""
        assert rmse([3.0, 4.0], [0.0, 0.0]) == pytest.approx(3.5355, abs=1e-4)

    def test_rmse_constant_residual(self):
        assert rmse([1.5, 2.5, 3.5], [3.0, 4.0, 5.0]) == pytest.approx(1.5)

    def test_rmse_errors(self):
        with pytest.raises(InvalidConfigError):
            rmse([1.0], [1.0, 2.0])
        with pytest.raises(InvalidConfigError):
            rmse([], [])

    @pytest.mark.parametrize(
        "ww,wu,expected",
        [(10.0, 12.0, 0.2), (10.0, 8.0, 0.0), (10.0, 10.0, 0.0), (0.0, 5.0, 0.0)],
    )
    def test_forgetting_ratio(self, ww, wu, expected):
        """Test max(0, wu - ww) / ww with the zero-loss convention."""
        assert forgetting_ratio(ww, wu) == pytest.approx(expected)

    def test_naive_rmse(self):
        """Test the delayed predictor over indices 1..2 of (1, 2, 4)."""
        stream = [Sample(np.array([0.0]), y, i) for i, y in enumerate([1.0, 2.0, 4.0])]
        assert naive_rmse(stream, range(1, 3)) == pytest.approx(math.sqrt(2.5))


class TestSplit:
    """Test suite for split validation."""

    def test_from_lengths(self):
        split = SplitSpec.from_lengths(3, 4, 10)
        assert (split.warmup, split.update, split.eval) == (range(0, 3), range(3, 7), range(7, 10))

    def test_split_past_stream_end(self, stream):
        with pytest.raises(InvalidSplitError):
            run_clear_protocol(stream, SplitSpec(range(0, 200), range(200, 400), range(400, 900)))

    def test_empty_phase(self, stream):
        with pytest.raises(InvalidSplitError):
            run_clear_protocol(stream, SplitSpec.from_lengths(200, 0, len(stream)))

    def test_non_contiguous(self, stream):
        with pytest.raises(InvalidSplitError):
            run_clear_protocol(stream, SplitSpec(range(0, 100), range(150, 200), range(200, 300)))


class TestClearProtocol:
    """Test suite for the three-phase protocol."""

    def test_perfect_model_reports_zero(self):
        """Test a zero series: every replay is exact."""
        stream = [Sample(np.array([x]), 0.0, i) for i, x in enumerate(np.linspace(-1, 1, 120))]
        report = run_clear_protocol(stream, SplitSpec.from_lengths(50, 30, 120))
        assert (report.fitting_rmse, report.prediction_rmse, report.forgetting_ratio) == (0.0, 0.0, 0.0)

    def test_report_is_consistent(self, stream, split):
        """Test the ratio is recomputed exactly from the two losses."""
        report = run_clear_protocol(stream, split)
        assert report.forgetting_ratio == forgetting_ratio(report.loss_ww, report.loss_wu)
        assert report.fitting_rmse >= 0 and report.prediction_rmse >= 0
        assert report.model_count >= 2
        assert report.sentinel_substitutions == 0

    def test_replaying_frozen_model_twice_forgets_nothing(self, stream, split):
        """Test two replays of the same frozen model agree exactly."""
        run = execute_clear_protocol(stream, split)
        first = frozen_replay(run.warmup_learner, stream, split.warmup)
        second = frozen_replay(run.warmup_learner, stream, split.warmup)
        a, b = rmse(first.predictions, first.targets), rmse(second.predictions, second.targets)
        assert a == b == run.report.loss_ww
        assert forgetting_ratio(a, b) == 0.0

    def test_snapshot_surgery_restores_warmup_loss(self, stream, split):
        """Test that dropping models created after warmup gives back L_ww."""
        run = execute_clear_protocol(stream, split)
        assert run.final_learner.model_count > run.warmup_learner.model_count

        kept = [m for m in run.final_learner.models if m.created_at < split.warmup.stop]
        pruned = SymplerLearner.from_models(1, run.final_learner.config, kept)
        trace = frozen_replay(pruned, stream, split.warmup)
        assert rmse(trace.predictions, trace.targets) == run.report.loss_ww

    def test_replay_does_not_learn(self, stream, split):
        """Test frozen replays leave the learner untouched."""
        run = execute_clear_protocol(stream, split)
        count = run.final_learner.model_count
        frozen_replay(run.final_learner, stream, split.eval)
        assert run.final_learner.model_count == count

    def test_sentinel_substitutions_counted(self, stream):
        """Test a warmup too short for any model falls back to the naive value."""
        short = stream[:50]
        run = execute_clear_protocol(short, SplitSpec.from_lengths(10, 30, 50))
        assert run.warmup_learner.model_count == 0
        assert run.report.sentinel_substitutions == 10
        assert all(run.traces["warmup"].substituted)

    def test_substitutions_counted_once_per_index(self, stream):
        """Test overlapping replays do not count a stream index twice.

        No model exists before index 14, so every replay falls back to the
        naive value and all 30 indices are substituted exactly once.
        """
        short = stream[:30]
        run = execute_clear_protocol(short, SplitSpec.from_lengths(5, 8, 30))
        assert run.final_learner.model_count == 0
        assert run.report.sentinel_substitutions == 30

    def test_offline_refit_forgets(self, stream, split):
        """Test the update-only refit loses the warmup regime."""
        offline = run_offline_protocol(stream, split)
        assert offline.model_count == 1
        assert offline.forgetting_ratio > 1.0

    def test_sympler_forgets_less_than_offline(self, stream, split):
        """Test local models protect the warmup regime."""
        sympler = run_clear_protocol(stream, split)
        offline = run_offline_protocol(stream, split)
        assert sympler.forgetting_ratio < offline.forgetting_ratio


class TestStandardize:
    """Test suite for z-scoring with external statistics."""

    def _stream(self):
        return [Sample(np.array([x, 5.0]), 2 * x + 1, i) for i, x in enumerate(np.linspace(0, 3, 7))]

    def test_identity_stats(self):
        stream = self._stream()
        stats = StandardizationStats(means=np.zeros(3), stds=np.ones(3))
        for a, b in zip(stream, standardize(stream, stats)):
            assert np.array_equal(a.x, b.x) and a.y == b.y

    def test_constant_column_passes_through(self):
        """Test a zero std divides by one instead of producing NaN."""
        stream = self._stream()
        stats = StandardizationStats(means=np.array([1.5, 5.0, 4.0]), stds=np.array([1.0, 0.0, 2.0]))
        out = standardize(stream, stats)
        assert all(s.x[1] == 0.0 for s in out)
        assert all(np.all(np.isfinite(s.x)) for s in out)

    def test_round_trip(self):
        stream = self._stream()
        stats = StandardizationStats(means=np.array([1.3, 2.0, -4.0]), stds=np.array([0.7, 3.0, 2.5]))
        back = destandardize(standardize(stream, stats), stats)
        for a, b in zip(stream, back):
            assert np.max(np.abs(a.x - b.x)) < 1e-12
            assert abs(a.y - b.y) < 1e-12

    def test_column_mismatch(self):
        stats = StandardizationStats(means=np.zeros(2), stds=np.ones(2))
        with pytest.raises(DimensionMismatchError):
            standardize(self._stream(), stats)


class TestTwoRegimeStream:
    """Test suite for the synthetic covariate-drift stream."""

    def test_layout(self):
        stream = two_regime_stream(seed=0, warmup=10, update=10, evaluation=20, noise=0.0)
        assert len(stream) == 40
        assert stream[5].y == pytest.approx(2 * stream[5].x[0])
        assert stream[15].y == pytest.approx(5 - 3 * stream[15].x[0])
        assert [s.index for s in stream] == list(range(40))

    def test_seeded(self):
        a, b = two_regime_stream(seed=4), two_regime_stream(seed=4)
        assert [s.y for s in a] == [s.y for s in b]
        assert [s.y for s in a] != [s.y for s in two_regime_stream(seed=5)]

    def test_invalid(self):
        with pytest.raises(InvalidConfigError):
            two_regime_stream(warmup=0)
