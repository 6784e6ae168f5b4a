import json

import pytest

from tppflow import EventPack
from tppflow.contexts.split import SplitContextData


class TestEventPack:
    """Tests for the EventPack carrier."""

    def test_from_file(self, renewal_path):
        """Test loading a pack from a CSV file."""
        pack = EventPack.from_file(str(renewal_path))
        assert len(pack.dataset) == 20
        assert pack.source_format == 'csv'

    def test_from_file_jsonl(self, test_files):
        """Test loading a pack from a JSONL file."""
        pack = EventPack.from_file(str(test_files['renewal.jsonl']))
        assert pack.source_format == 'jsonl'
        assert pack.dataset.num_events == 240

    def test_from_missing_file(self, tmp_path):
        """Test the error for a missing event file."""
        with pytest.raises(FileNotFoundError):
            EventPack.from_file(str(tmp_path / 'nothing.csv'))

    def test_keyword_context(self):
        """Test that extra keywords land in the free-form context."""
        pack = EventPack.from_bytes(b"seq_id,time,mark\na,1,x\n", horizon=5.0)
        assert pack.context['horizon'] == 5.0

    def test_to_bytes_round_trip(self, small_pack):
        """Test that to_bytes reparses to the same dataset."""
        again = EventPack.from_bytes(small_pack.to_bytes())
        assert [s.events for s in again.dataset] == [s.events for s in small_pack.dataset]

    def test_copy_shares_contexts(self, small_pack):
        """Test that copies carry structured contexts but do not alias the registry."""
        pack = small_pack.split(seed=1)
        clone = pack.copy()
        assert clone.has_context('split')
        clone.remove_context('split')
        assert pack.has_context('split')

    def test_add_and_get_context(self, small_pack):
        """Test context bookkeeping."""
        context = SplitContextData(small_pack.dataset, small_pack.dataset, small_pack.dataset)
        small_pack.add_context(context)
        assert small_pack.get_context('split') is context
        assert small_pack.remove_context('split')
        assert not small_pack.remove_context('split')

    def test_require_context_names_producer(self, small_pack):
        """Test that a missing context error suggests the producing operation."""
        with pytest.raises(ValueError, match="'split'"):
            small_pack.require_context('split', 'evaluate')

    def test_unknown_attribute(self, small_pack):
        """Test that unregistered names raise AttributeError."""
        with pytest.raises(AttributeError):
            small_pack.no_such_operation()

    def test_to_json(self, small_pack):
        """Test the JSON summary of a split pack."""
        data = json.loads(small_pack.split(seed=0).to_json())
        assert data['dataset']['sequences'] == 10
        assert data['structured_contexts']['split']['train'] == 8

    def test_log_missing_contexts(self, small_pack, caplog):
        """Test the warning listing producers of missing contexts."""
        small_pack.log_missing_contexts(['deletion'], 'evaluate')
        assert "delete_events" in caplog.text
