"""Transfer and multi-step forecasting on history-dependent synthetic data."""
import pytest

from tppflow.core.events import split_dataset
from tppflow.core.synthetic import alternating, lognormal_renewal
from tppflow.harness.metrics import evaluate_forecast
from tppflow.models.mtpp import ModelConfig, MtppModel, global_mean_gap, train
from tppflow.models.training import TrainConfig
from tppflow.models.transfer import TransferConfig, epochs_to_threshold, fine_tune, time_nll_curve, train_source

pytestmark = pytest.mark.slow

SEEDS = range(5)
MODEL = ModelConfig(embedding_size=8, input_size=8, hidden_size=16)


def _transfer_run(seed):
    source = lognormal_renewal(200, 20, num_marks=3, seed=seed)
    target = lognormal_renewal(30, 20, num_marks=2, seed=seed + 100, mark_prefix='t')
    train_part, validation = target.subset(range(24)), target.subset(range(24, 30))
    source_model, _ = train_source(source, MODEL, TrainConfig(epochs=8, learning_rate=0.03, seed=seed))

    config = TrainConfig(epochs=10, learning_rate=0.01, seed=seed)
    _, tuned = fine_tune(source_model, train_part, TransferConfig(lr_multiplier=1.0, seed=seed), config,
                         validation)
    scratch_model = MtppModel.for_dataset(train_part, MODEL, seed=seed)
    _, scratch = train(scratch_model, train_part, config, validation)
    return time_nll_curve(tuned), time_nll_curve(scratch)


class TestTransfer:
    """Fine-tuning a pre-trained model against training from scratch on 30 target sequences."""

    def test_better_and_faster(self):
        """Test lower final time NLL and fewer epochs to the scratch optimum on four of five seeds."""
        better = faster = 0
        for seed in SEEDS:
            tuned, scratch = _transfer_run(seed)
            better += int(tuned[-1] < scratch[-1])
            threshold = min(scratch)
            tuned_epochs = epochs_to_threshold(tuned, threshold)
            faster += int(tuned_epochs is not None and tuned_epochs < epochs_to_threshold(scratch, threshold))
        assert better >= 4
        assert faster >= 4


class TestForecast:
    """Per-step forecast error against stepping by the global mean gap."""

    def test_first_step_beats_naive(self):
        """Test that the first forecast step beats the naive predictor on four of five seeds."""
        wins = 0
        for seed in SEEDS:
            train_part, _, test = split_dataset(alternating(60, 20, seed=seed), seed=seed)
            model = MtppModel.for_dataset(train_part, MODEL, seed=seed)
            fitted, _ = train(model, train_part, TrainConfig(epochs=25, batch_size=8, learning_rate=0.03,
                                                            seed=seed))
            score, _ = evaluate_forecast(fitted, test, 5, global_mean_gap(train_part), seed)
            assert len(score.mae_per_step) == 5
            wins += int(score.mae_per_step[0] < score.naive_mae_per_step[0])
        assert wins >= 4
