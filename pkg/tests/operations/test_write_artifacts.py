import json

import pandas as pd
import pytest

from tppflow import EventPack
from tppflow.core.ingest import read_dataset
from tppflow.models.hawkes import HawkesFitConfig, HawkesParams, simulate_dataset
from tppflow.models.imtpp import ImtppConfig
from tppflow.models.mtpp import MtppModel
from tppflow.operations.write_artifacts import WriteArtifactsConsumer


@pytest.fixture
def evaluated_pack(small_pack, tiny_model_config, quick_train_config):
    return small_pack.split().fit(tiny_model_config, quick_train_config).evaluate().forecast(horizon=2)


class TestWriteArtifactsConsumer:
    """Tests for the WriteArtifactsConsumer class."""

    def test_init(self, tmp_path):
        """Test that parameters are stored."""
        consumer = WriteArtifactsConsumer(tmp_path, task='fit', seed=3)
        assert consumer.output_dir == tmp_path
        assert consumer.seed == 3
        assert consumer.name == 'write_artifacts'

    def test_fit_artifacts(self, evaluated_pack, tmp_path):
        """Test metrics, curves and the model checkpoint of a fit."""
        written = WriteArtifactsConsumer(tmp_path, task='fit', seed=0)(evaluated_pack)
        assert set(written) == {'metrics', 'curves', 'model'}

        report = json.loads((tmp_path / 'metrics.json').read_text(encoding='utf-8'))
        assert report['metadata']['task'] == 'fit'
        assert report['metadata']['split'] == 'test'
        assert report['metadata']['model_kind'] == 'mtpp'
        assert report['forecast']['horizon'] == 2
        assert report['imputation'] is None
        assert report['hawkes'] is None

        curves = pd.read_csv(tmp_path / 'curves.csv')
        assert list(curves.columns) == ['epoch', 'split', 'value']
        assert set(curves['split']) == {'train', 'validation'}

        model = MtppModel.load(tmp_path / 'model.npz')
        assert model.vocab == evaluated_pack.dataset.vocab

    def test_rerun_byte_identical(self, evaluated_pack, tmp_path):
        """Test that writing twice gives the same bytes."""
        WriteArtifactsConsumer(tmp_path / 'a')(evaluated_pack)
        WriteArtifactsConsumer(tmp_path / 'b')(evaluated_pack)
        for name in ('metrics.json', 'curves.csv'):
            assert (tmp_path / 'a' / name).read_bytes() == (tmp_path / 'b' / name).read_bytes()

    def test_empty_pack(self, small_pack, tmp_path):
        """Test that a pack without results still gets a complete report and an empty curve table."""
        written = WriteArtifactsConsumer(tmp_path, task='simulate', write_events=True)(small_pack)
        assert set(written) == {'metrics', 'curves', 'events'}
        report = json.loads(written['metrics'].read_text(encoding='utf-8'))
        assert report['time_mae'] is None
        assert report['mark_accuracy_at_k'] == {'1': None, '5': None, '10': None}
        assert report['metadata']['model_kind'] is None
        assert read_dataset(str(written['events'])).num_events == small_pack.dataset.num_events
        assert pd.read_csv(written['curves']).empty

    def test_imputed_events(self, small_pack, tiny_model_config, quick_train_config, tmp_path):
        """Test that imputations and the ELBO curve are written."""
        pack = (small_pack.delete_events(0.3, seed=1)
                .fit_imtpp(tiny_model_config, quick_train_config, ImtppConfig(max_missing=2))
                .impute(samples_per_gap=1))
        written = WriteArtifactsConsumer(tmp_path, task='fit-imtpp')(pack)
        imputed = read_dataset(str(written['imputed']))
        assert len(imputed) == len(small_pack.dataset)
        curves = pd.read_csv(written['curves'])
        assert 'elbo' in set(curves['split'])
        report = json.loads(written['metrics'].read_text(encoding='utf-8'))
        assert report['elbo_final'] is not None

    def test_hawkes_artifacts(self, tmp_path):
        """Test the parameter text file and the community table."""
        params = HawkesParams([0.3, 0.3], [[0.2, 0.0], [0.0, 0.2]], beta=1.0)
        pack = (EventPack(simulate_dataset(params, 3, 20.0, seed=1), {'horizon': 20.0})
                .fit_hawkes(fit_config=HawkesFitConfig(epochs=10))
                .assign_communities(K=2))
        written = WriteArtifactsConsumer(tmp_path, task='fit-hawkes')(pack)
        fitted = HawkesParams.from_text(written['hawkes_params'].read_text(encoding='utf-8'))
        assert fitted.num_users == 2
        table = pd.read_csv(written['communities'])
        assert list(table.columns) == ['user', 'community']
        assert list(table['user']) == ['u0', 'u1']
        report = json.loads(written['metrics'].read_text(encoding='utf-8'))
        assert len(report['hawkes']['A']) == 2
        assert report['community'] is not None
