import numpy as np
import pytest

from tppflow import EventPack
from tppflow.core.synthetic import lognormal_renewal
from tppflow.models.transfer import TransferConfig, frozen_params, train_source
from tppflow.operations.fine_tune import FineTuneOperation

SPLIT = (0.5, 0.25, 0.25)


@pytest.fixture
def target_pack():
    return EventPack(lognormal_renewal(6, 8, num_marks=4, seed=21, mark_prefix='t')).split(SPLIT)


@pytest.fixture
def source(small_dataset, tiny_model_config, quick_train_config):
    return train_source(small_dataset, tiny_model_config, quick_train_config)


class TestFineTuneOperation:
    """Tests for the FineTuneOperation class."""

    def test_registration(self):
        """Test that the operation is registered with EventPack."""
        assert EventPack._operations['fine_tune'] is FineTuneOperation

    def test_source_type(self):
        """Test that the source must be a base MTPP."""
        with pytest.raises(TypeError):
            FineTuneOperation(source_model='model.npz')

    def test_apply(self, target_pack, source, quick_train_config):
        """Test that fine-tuning adds both the fit and the transfer context."""
        model, trace = source
        config = TransferConfig(freeze=['encoder'], lr_multiplier=1.0)
        result = target_pack.fine_tune(model, config, quick_train_config, source_trace=trace)
        fit = result.get_context('fit')
        transfer = result.get_context('transfer')
        assert fit.kind == 'mtpp'
        assert fit.model.vocab == target_pack.dataset.vocab
        assert fit.train_size == 3
        for name in frozen_params(model, ['encoder']):
            if name in fit.model.store and fit.model.store[name].shape == model.store[name].shape:
                assert np.array_equal(fit.model.store[name], model.store[name])
        summary = transfer.to_dict()
        assert summary['freeze'] == ['encoder']
        assert summary['source_epochs'] == 2
        assert summary['target_epochs'] == 2
        assert transfer.scratch_trace is None

    def test_compare_scratch(self, target_pack, source, quick_train_config):
        """Test that the scratch baseline trains for as many epochs as the fine-tuned run."""
        model, _ = source
        transfer = target_pack.fine_tune(model, TransferConfig(), quick_train_config,
                                         compare_scratch=True).get_context('transfer')
        assert len(transfer.scratch_trace) == len(transfer.target_trace)
        assert transfer.scratch_epochs_to_threshold in (1, 2)
        assert transfer.to_dict()['scratch_epochs_to_threshold'] == transfer.scratch_epochs_to_threshold

    def test_evaluate_after_fine_tune(self, target_pack, source, quick_train_config):
        """Test that the tuned model is scored in the target vocabulary."""
        model, _ = source
        report = (target_pack.fine_tune(model, TransferConfig(), quick_train_config)
                  .evaluate().get_context('metrics').report)
        assert report.num_predictions == 7
