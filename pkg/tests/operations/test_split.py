import pytest

from tppflow import EventPack
from tppflow.operations.split import SplitOperation, evaluation_set, training_sets


class TestSplitOperation:
    """Tests for the SplitOperation class."""

    def test_registration(self):
        """Test that the operation is registered with EventPack."""
        assert EventPack._operations['split'] is SplitOperation

    def test_init(self):
        """Test default and explicit parameters."""
        op = SplitOperation()
        assert op.ratios == (0.8, 0.1, 0.1)
        assert op.seed == 0
        op = SplitOperation([0.5, 0.25, 0.25], seed=4)
        assert op.ratios == (0.5, 0.25, 0.25)
        assert op.seed == 4

    def test_apply(self, small_pack):
        """Test that the split context partitions the dataset."""
        result = small_pack.split(seed=0)
        split = result.get_context('split')
        assert (len(split.train), len(split.validation), len(split.test)) == (8, 1, 1)
        ids = [s.id for part in (split.train, split.validation, split.test) for s in part]
        assert sorted(ids) == sorted(s.id for s in small_pack.dataset)
        assert not small_pack.has_context('split')

    def test_seeded(self, small_pack):
        """Test that the seed fixes the partition."""
        a = small_pack.split(seed=3).get_context('split')
        b = small_pack.split(seed=3).get_context('split')
        assert [s.id for s in a.test] == [s.id for s in b.test]

    def test_bad_ratios(self, small_pack):
        """Test that ratios must sum to one."""
        with pytest.raises(ValueError):
            small_pack.split((0.5, 0.2, 0.2))

    def test_set_helpers(self, small_pack):
        """Test the training and evaluation sets with and without a split."""
        train, validation = training_sets(small_pack)
        assert train is small_pack.dataset and validation is None
        assert evaluation_set(small_pack) is small_pack.dataset

        split_pack = small_pack.split()
        split = split_pack.get_context('split')
        assert training_sets(split_pack) == (split.train, split.validation)
        assert evaluation_set(split_pack) is split.test
