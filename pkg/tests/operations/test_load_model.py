import pytest

from tppflow import EventPack
from tppflow.autodiff import ParamStore, save_checkpoint
from tppflow.core.errors import CheckpointError
from tppflow.models.imtpp import ImtppModel
from tppflow.models.mtpp import MtppModel, sequence_nll
from tppflow.operations.load_model import LoadModelOperation, load_model


class TestLoadModel:
    """Tests for checkpoint loading and the LoadModelOperation class."""

    def test_registration(self):
        """Test that the operation is registered with EventPack."""
        assert EventPack._operations['load_model'] is LoadModelOperation

    def test_mtpp(self, small_pack, small_dataset, tiny_model_config, tmp_path):
        """Test that a saved MTPP is attached as an untrained fit."""
        model = MtppModel.for_dataset(small_dataset, tiny_model_config, seed=1)
        path = tmp_path / 'model.npz'
        model.save(path)
        fit = small_pack.load_model(path).get_context('fit')
        assert fit.kind == 'mtpp'
        assert len(fit.trace) == 0
        seq = small_dataset.sequences[0]
        assert sequence_nll(fit.model, seq) == sequence_nll(model, seq)

    def test_imtpp(self, small_dataset, tiny_model_config, tmp_path):
        """Test that the recorded kind selects the model class."""
        path = tmp_path / 'imtpp.npz'
        ImtppModel.for_dataset(small_dataset, tiny_model_config).save(path)
        model, kind = load_model(path)
        assert kind == 'imtpp'
        assert isinstance(model, ImtppModel)

    def test_unknown_kind(self, tmp_path):
        """Test that a checkpoint of another kind is refused."""
        path = tmp_path / 'other.npz'
        store = ParamStore()
        store.add('w', [1.0])
        save_checkpoint(store, path, {'kind': 'hawkes'})
        with pytest.raises(CheckpointError):
            load_model(path)

    def test_missing_file(self, small_pack, tmp_path):
        """Test that a missing checkpoint is reported as unreadable."""
        with pytest.raises(CheckpointError):
            small_pack.load_model(tmp_path / 'absent.npz')
