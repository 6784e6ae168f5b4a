import math

import numpy as np
import pytest

from tppflow.core.errors import VocabularyMismatchError
from tppflow.core.events import Dataset, Event, Sequence
from tppflow.harness.metrics import (
    TOP_K,
    MetricsReport,
    align_dataset,
    evaluate,
    evaluate_forecast,
    evaluate_imputation,
    evaluate_imputation_dataset,
    finite_or_none,
    smoothed,
)
from tppflow.models.heads import LogNormalParams
from tppflow.models.imtpp import ImtppModel
from tppflow.models.mtpp import ModelConfig, MtppModel, predict_next


@pytest.fixture
def unit_gap_model():
    """Constant heads whose median gap is exactly 1 and whose marks are tied."""
    model = MtppModel.create(('a', 'b', 'c'), config=ModelConfig(constant_heads=True))
    model.store.set('time_head.b_mean', 0.0)
    return model


def _regular(seq_id, length, mark=0):
    return Sequence(seq_id, [Event(mark, float(t)) for t in range(1, length + 1)])


class TestMetricsReport:
    """Tests for the report structure."""

    def test_all_fields_present(self):
        """Test that an empty report serializes every key as null."""
        data = MetricsReport().to_dict()
        for key in ('time_mae', 'dist_mae', 'nll_per_event', 'elbo_final', 'imputation', 'forecast',
                    'transfer', 'hawkes', 'community'):
            assert data[key] is None
        assert data['mark_accuracy_at_k'] == {'1': None, '5': None, '10': None}
        assert data['nll_components'] == {'mark': None, 'time': None, 'dist': None}
        assert data['num_predictions'] == 0
        assert data['metadata']['time_point_estimate'] == 'median'


class TestEvaluate:
    """Tests for next-event metrics."""

    def test_perfect_predictions(self, unit_gap_model):
        """Test zero time error and full accuracy on unit-gap single-mark data."""
        ds = Dataset([_regular('x', 5), _regular('y', 4)], ('a', 'b', 'c'))
        report = evaluate(unit_gap_model, ds)
        assert report.num_predictions == 7
        assert report.time_mae == 0.0
        assert report.mark_accuracy_at_k == {'1': 1.0, '5': 1.0, '10': 1.0}
        assert report.dist_mae is None
        assert report.nll_components['mark'] == pytest.approx(np.log(3.0))

    def test_top_k_nesting(self, small_dataset, tiny_model_config):
        """Test that accuracy never decreases with k and saturates past the vocabulary size."""
        model = MtppModel.for_dataset(small_dataset, tiny_model_config, seed=0)
        report = evaluate(model, small_dataset)
        accuracy = [report.mark_accuracy_at_k[str(k)] for k in TOP_K]
        assert accuracy == sorted(accuracy)
        assert accuracy[1] == 1.0

    def test_time_mae_uses_predicted_median(self, small_dataset, tiny_model_config):
        """Test the time error against per-prefix predictions."""
        model = MtppModel.for_dataset(small_dataset, tiny_model_config, seed=0)
        seq = small_dataset.sequences[0]
        report = evaluate(model, Dataset([seq], small_dataset.vocab))
        errors = [abs(predict_next(model, seq.prefix(k)).dt - (seq[k].time - seq[k - 1].time))
                  for k in range(1, len(seq))]
        assert report.time_mae == pytest.approx(np.mean(errors))

    def test_order_independent(self, small_dataset, tiny_model_config):
        """Test that shuffling the sequences leaves every metric unchanged."""
        model = MtppModel.for_dataset(small_dataset, tiny_model_config, seed=0)
        shuffled = small_dataset.with_sequences(reversed(small_dataset.sequences))
        assert evaluate(model, shuffled).to_dict() == evaluate(model, small_dataset).to_dict()

    def test_missing_event_model_nll(self, small_dataset, tiny_model_config):
        """Test that a posterior which never places an event scores exactly like its observed model."""
        model = ImtppModel.create(small_dataset.vocab, False, LogNormalParams(math.log(1e4), 0.01),
                                  tiny_model_config, seed=3)
        report = evaluate(model, small_dataset)
        assert report.nll_per_event == pytest.approx(evaluate(model.observed, small_dataset).nll_per_event,
                                                     rel=1e-12)

    def test_no_predictions(self, unit_gap_model):
        """Test that single-event sequences leave the metrics empty."""
        report = evaluate(unit_gap_model, Dataset([_regular('x', 1)], ('a', 'b', 'c')))
        assert report.num_predictions == 0
        assert report.time_mae is None


class TestAlignment:
    """Tests for vocabulary alignment."""

    def test_subset_vocabulary(self, unit_gap_model):
        """Test that marks are re-indexed into the model vocabulary."""
        ds = Dataset([Sequence('x', [Event(0, 1.0), Event(0, 2.0)])], ('c',))
        aligned = align_dataset(unit_gap_model, ds)
        assert aligned.vocab == ('a', 'b', 'c')
        assert aligned.sequences[0][0].mark == 2

    def test_unknown_mark(self, unit_gap_model):
        """Test that a mark outside the model vocabulary is refused."""
        ds = Dataset([_regular('x', 3)], ('z',))
        with pytest.raises(VocabularyMismatchError):
            evaluate(unit_gap_model, ds)


class TestImputationMetrics:
    """Tests for matching imputed events to deleted ones."""

    def test_exact_imputation(self):
        """Test that imputing exactly the deleted events scores zero error."""
        imputed = Sequence('s', [Event(0, 1.0), Event(1, 2.0, imputed=True), Event(0, 3.0),
                                 Event(1, 3.5, imputed=True), Event(0, 5.0)])
        score = evaluate_imputation(imputed, [Event(1, 2.0), Event(1, 3.5)])
        assert score.matched_mae == 0.0
        assert score.count_error == 0.0
        assert score.matches == 2

    def test_nothing_deleted_nothing_imputed(self):
        """Test the empty case."""
        score = evaluate_imputation(_regular('s', 4), [])
        assert score.matched_mae is None
        assert score.count_error == 0.0

    def test_matching_stays_in_gap(self):
        """Test that an imputed event cannot match a deleted event from another gap."""
        imputed = Sequence('s', [Event(0, 1.0), Event(0, 1.9, imputed=True), Event(0, 2.0), Event(0, 3.0)])
        score = evaluate_imputation(imputed, [Event(0, 2.1)])
        assert score.matches == 0
        assert score.matched_mae is None
        assert score.count_error == 0.0

    def test_greedy_pairs(self):
        """Test that the closest pairs are matched first and each event only once."""
        imputed = Sequence('s', [Event(0, 0.0), Event(0, 1.0, imputed=True), Event(0, 1.2, imputed=True),
                                 Event(0, 4.0)])
        score = evaluate_imputation(imputed, [Event(0, 1.1), Event(0, 3.0), Event(0, 3.5)])
        assert score.matches == 2
        assert score.matched_mae == pytest.approx((0.1 + 2.0) / 2)
        assert score.count_error == pytest.approx(1 / 3)

    def test_dataset_pooling(self):
        """Test that counts and errors are pooled over sequences."""
        a = Sequence('a', [Event(0, 1.0), Event(0, 1.5, imputed=True), Event(0, 2.0)])
        b = Sequence('b', [Event(0, 1.0), Event(0, 2.0)])
        ds = Dataset([a, b], ('m',))
        score = evaluate_imputation_dataset(ds, {'a': [Event(0, 1.25)], 'b': [Event(0, 1.5)]})
        assert score.num_imputed == 1
        assert score.num_deleted == 2
        assert score.matched_mae == pytest.approx(0.25)
        assert score.count_error == 0.5


class TestForecastMetrics:
    """Tests for the rollout score."""

    def test_unit_gaps(self, unit_gap_model):
        """Test that the deterministic rollout and the naive baseline are exact on unit gaps."""
        ds = Dataset([_regular('x', 6)], ('a', 'b', 'c'))
        score, forecasts = evaluate_forecast(unit_gap_model, ds, horizon=2, mean_gap=1.0)
        assert score.mae_per_step == pytest.approx([0.0, 0.0])
        assert score.naive_mae_per_step == [0.0, 0.0]
        assert [event.time for event in forecasts['x']] == pytest.approx([5.0, 6.0])

    def test_bad_horizon(self, unit_gap_model):
        """Test the horizon check."""
        with pytest.raises(ValueError):
            evaluate_forecast(unit_gap_model, Dataset([_regular('x', 6)], ('a', 'b', 'c')), 0, 1.0)


class TestHelpers:
    """Tests for the small numeric helpers."""

    def test_smoothed(self):
        """Test the trailing moving average."""
        assert smoothed([1.0, 3.0, 5.0, 7.0], window=2) == [1.0, 2.0, 4.0, 6.0]

    def test_finite_or_none(self):
        """Test that non-finite values become None."""
        assert finite_or_none(float('nan')) is None
        assert finite_or_none(None) is None
        assert finite_or_none(np.float64(2.5)) == 2.5
