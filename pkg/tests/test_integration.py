import json

import numpy as np
import pytest

from tppflow import EventPack, Operation
from tppflow.models.hawkes import HawkesFitConfig
from tppflow.models.imtpp import ImtppConfig
from tppflow.models.mtpp import forecast


class TestIntegration:
    """Integration tests for the tppflow package."""

    def test_operation_chaining(self, small_pack, tiny_model_config, quick_train_config):
        """Test chaining split, fit, evaluate and forecast."""
        result = (
            small_pack
            .split(seed=2)
            .fit(tiny_model_config, quick_train_config)
            .evaluate()
            .forecast(horizon=3)
        )
        for name in ('split', 'fit', 'metrics', 'forecast'):
            assert result.has_context(name)
        assert result.get_context('metrics').report.num_predictions == 7
        summary = json.loads(result.to_json())
        assert set(summary['structured_contexts']) == {'split', 'fit', 'metrics', 'forecast'}

    def test_custom_operation(self, small_pack):
        """Test creating and using a custom operation."""
        @Operation.register('drop_marks')
        class DropMarksOperation(Operation):
            def apply(self, pack):
                sequences = [seq.with_events(e for e in seq if e.mark != 0) for seq in pack.dataset]
                return pack.copy(new_dataset=pack.dataset.with_sequences(sequences), marks_dropped=True)

        result = small_pack.drop_marks()
        assert all(event.mark != 0 for seq in result.dataset for event in seq)
        assert result.context['marks_dropped'] is True

    def test_from_file_with_operations(self, renewal_path, tiny_model_config, quick_train_config):
        """Test loading events from file and fitting on them."""
        result = EventPack.from_file(renewal_path).split().fit(tiny_model_config, quick_train_config)
        fit = result.get_context('fit')
        assert fit.train_size == 16
        assert fit.model.vocab == result.dataset.vocab

    def test_missing_event_pipeline(self, small_pack, tiny_model_config, quick_train_config):
        """Test deletion, missing-event fitting, imputation and scoring in one chain."""
        result = (
            small_pack
            .delete_events(0.3, seed=4)
            .split()
            .fit_imtpp(tiny_model_config, quick_train_config, ImtppConfig(max_missing=2))
            .impute(samples_per_gap=1)
            .evaluate()
        )
        section = result.get_context('metrics').report.sections['imputation']
        assert section['num_deleted'] >= 0
        assert section['count_error'] >= 0.0

    def test_hawkes_pipeline(self, small_pack):
        """Test fitting a Hawkes process and clustering its users from the same pack."""
        result = small_pack.fit_hawkes(fit_config=HawkesFitConfig(epochs=5)).assign_communities(K=2)
        assert result.get_context('hawkes').params.num_users == 3
        assert result.get_context('community').assignment.labels.shape == (3,)

    def test_trained_model_forecasts(self, small_pack, tiny_model_config, quick_train_config):
        """Test that a fitted model rolls out increasing timestamps."""
        model = small_pack.fit(tiny_model_config, quick_train_config).get_context('fit').model
        seq = small_pack.dataset.sequences[0]
        events = forecast(model, seq, 4, deterministic=True)
        assert np.all(np.diff([seq[-1].time] + [event.time for event in events]) > 0)

    def test_chain_leaves_input_untouched(self, small_pack, tiny_model_config, quick_train_config):
        """Test that operations return new packs."""
        small_pack.split().fit(tiny_model_config, quick_train_config)
        assert small_pack.get_all_contexts() == {}
        with pytest.raises(ValueError):
            small_pack.evaluate()
