import numpy as np
import pytest

from tppflow import EventPack
from tppflow.models.imtpp import ImtppConfig, ImtppModel
from tppflow.models.mtpp import MtppModel, nll_components
from tppflow.operations.fit import FitOperation
from tppflow.operations.fit_imtpp import FitImtppOperation


class TestFitOperation:
    """Tests for the FitOperation class."""

    def test_registration(self):
        """Test that both fitting operations are registered with EventPack."""
        assert EventPack._operations['fit'] is FitOperation
        assert EventPack._operations['fit_imtpp'] is FitImtppOperation

    def test_init_defaults(self):
        """Test that missing settings fall back to the defaults."""
        op = FitOperation()
        assert op.model_config.hidden_size > 0
        assert op.train_config.epochs > 0
        assert not op.temporal_only

    def test_fit_on_split(self, small_pack, tiny_model_config, quick_train_config):
        """Test that fitting uses the training split and records the validation curve."""
        result = small_pack.split().fit(tiny_model_config, quick_train_config)
        fit = result.get_context('fit')
        assert isinstance(fit.model, MtppModel)
        assert fit.kind == 'mtpp'
        assert fit.train_size == 8
        assert len(fit.trace) == 2
        assert len(fit.trace.validation) == 2
        assert fit.to_dict()['parameters'] == fit.model.store.num_parameters

    def test_fit_without_split(self, small_pack, tiny_model_config, quick_train_config):
        """Test that an unsplit pack trains on everything."""
        fit = small_pack.fit(tiny_model_config, quick_train_config).get_context('fit')
        assert fit.train_size == 10
        assert not fit.trace.validation

    def test_reproducible(self, small_pack, tiny_model_config, quick_train_config):
        """Test that a fixed seed gives identical parameters."""
        a = small_pack.fit(tiny_model_config, quick_train_config).get_context('fit').model
        b = small_pack.fit(tiny_model_config, quick_train_config).get_context('fit').model
        for name in a.store:
            assert np.array_equal(a.store[name], b.store[name])

    def test_temporal_only(self, spatial_dataset, tiny_model_config, quick_train_config):
        """Test that temporal-only fitting ignores locations."""
        pack = EventPack(spatial_dataset)
        fit = pack.fit(tiny_model_config, quick_train_config, temporal_only=True).get_context('fit')
        assert nll_components(fit.model, spatial_dataset.sequences[0])['dist'] is None


class TestFitImtppOperation:
    """Tests for the FitImtppOperation class."""

    def test_apply(self, small_pack, tiny_model_config, quick_train_config):
        """Test that the missing-event model is fitted and tagged."""
        result = small_pack.split().fit_imtpp(tiny_model_config, quick_train_config, ImtppConfig(max_missing=2))
        fit = result.get_context('fit')
        assert isinstance(fit.model, ImtppModel)
        assert fit.kind == 'imtpp'
        assert len(fit.trace) == 2
        assert all(np.isfinite(fit.trace.train))

    def test_empty_pack(self, small_dataset, tiny_model_config, quick_train_config):
        """Test that there must be something to train on."""
        pack = EventPack(small_dataset.with_sequences([]))
        with pytest.raises(ValueError):
            pack.fit_imtpp(tiny_model_config, quick_train_config)
