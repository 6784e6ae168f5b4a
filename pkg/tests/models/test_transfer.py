import numpy as np
import pytest

from tppflow.core.errors import ConfigError
from tppflow.core.synthetic import lognormal_renewal
from tppflow.models.mtpp import MtppModel, nll_components
from tppflow.models.transfer import (
    TransferConfig,
    epochs_to_threshold,
    fine_tune,
    frozen_params,
    temporal_only_mode,
    time_nll_curve,
    train_source,
)


@pytest.fixture
def target():
    return lognormal_renewal(6, 8, num_marks=4, seed=21, mark_prefix='t')


@pytest.fixture
def source_model(small_dataset, tiny_model_config, quick_train_config):
    model, _ = train_source(small_dataset, tiny_model_config, quick_train_config)
    return model


class TestTransferConfig:
    """Tests for fine-tuning settings."""

    def test_freeze_from_string(self):
        """Test the comma-separated freeze list."""
        assert TransferConfig(freeze='encoder, time_head').freeze == {'encoder', 'time_head'}

    def test_unknown_component(self):
        """Test that unknown component names are rejected."""
        with pytest.raises(ConfigError):
            TransferConfig(freeze=['decoder'])

    def test_everything_frozen(self):
        """Test that at least one component must train."""
        with pytest.raises(ConfigError):
            TransferConfig(freeze=['encoder', 'time_head', 'dist_head', 'mark_head'])

    def test_lr_multiplier(self):
        """Test that the multiplier must be positive."""
        with pytest.raises(ConfigError):
            TransferConfig(lr_multiplier=0.0)


class TestFineTune:
    """Tests for source-to-target adaptation."""

    def test_frozen_components_bit_identical(self, source_model, target, quick_train_config):
        """Test that frozen parameters do not move."""
        config = TransferConfig(freeze=['encoder', 'time_head'], lr_multiplier=1.0)
        tuned, trace = fine_tune(source_model, target, config, quick_train_config)
        assert len(trace) == 2
        for name in frozen_params(source_model, ['encoder', 'time_head']):
            assert np.array_equal(tuned.store[name], source_model.store[name])
        assert not tuned.store.frozen

    def test_trainable_components_move(self, source_model, target, quick_train_config):
        """Test that unfrozen parameters are updated."""
        tuned, _ = fine_tune(source_model, target, TransferConfig(lr_multiplier=1.0), quick_train_config)
        assert not np.array_equal(tuned.store['encoder.w_z'], source_model.store['encoder.w_z'])

    def test_zero_epochs(self, source_model, target, quick_train_config):
        """Test that zero target epochs only swap the mark vocabulary."""
        tuned, trace = fine_tune(source_model, target, TransferConfig(target_epochs=0), quick_train_config)
        assert len(trace) == 0
        assert tuned.vocab == target.vocab
        assert np.array_equal(tuned.store['encoder.w_c'], source_model.store['encoder.w_c'])
        assert tuned.store['mark_head.bias'].shape == (4,)

    def test_source_untouched(self, source_model, target, quick_train_config):
        """Test that the source model keeps its vocabulary and values."""
        before = source_model.store.values()
        fine_tune(source_model, target, TransferConfig(), quick_train_config)
        assert source_model.num_marks == 3
        for name, value in before.items():
            assert np.array_equal(source_model.store[name], value)

    def test_spatial_source_temporal_target(self, spatial_dataset, target, tiny_model_config, quick_train_config):
        """Test that a located source adapts to timestamp-only data without touching the distance head."""
        source, _ = train_source(spatial_dataset, tiny_model_config, quick_train_config)
        tuned, _ = fine_tune(source, target, TransferConfig(lr_multiplier=1.0), quick_train_config)
        assert not tuned.models_distance
        for name in tuned.component_params('dist_head'):
            assert np.array_equal(tuned.store[name], source.store[name])

    def test_validation_curve(self, source_model, target, quick_train_config):
        """Test the per-epoch time NLL on held-out target data."""
        _, trace = fine_tune(source_model, target, TransferConfig(), quick_train_config,
                             validation=target.subset([0, 1]))
        curve = time_nll_curve(trace)
        assert len(curve) == 2
        assert all(np.isfinite(curve))

    def test_empty_target(self, source_model, target):
        """Test that an empty target is refused."""
        with pytest.raises(ValueError):
            fine_tune(source_model, target.with_sequences([]))


class TestHelpers:
    """Tests for the transfer helpers."""

    def test_temporal_only_mode(self, spatial_dataset, tiny_model_config):
        """Test switching the distance term off and back on."""
        model = MtppModel.for_dataset(spatial_dataset, tiny_model_config)
        seq = spatial_dataset.sequences[0]
        assert nll_components(temporal_only_mode(model), seq)['dist'] is None
        restored = temporal_only_mode(temporal_only_mode(model), enabled=False)
        assert nll_components(restored, seq)['dist'] is not None

    def test_epochs_to_threshold(self):
        """Test the first epoch at or under a threshold."""
        assert epochs_to_threshold([3.0, 2.0, 1.0], 2.0) == 2
        assert epochs_to_threshold([3.0, 2.5], 1.0) is None

    def test_train_source_seeded(self, small_dataset, tiny_model_config, quick_train_config):
        """Test that the training seed also fixes the initialization."""
        a, _ = train_source(small_dataset, tiny_model_config, quick_train_config)
        b, _ = train_source(small_dataset, tiny_model_config, quick_train_config)
        assert np.array_equal(a.store['time_head.w_mean'], b.store['time_head.w_mean'])
