from ..core.events import split_dataset
from ..core.operation import Operation
from ..contexts.split import SplitContextData


@SplitContextData.register_as_producer
@Operation.register
class SplitOperation(Operation):
    """
    Partition the pack's sequences into train, validation and test sets.
    """

    def __init__(self, ratios=(0.8, 0.1, 0.1), seed=0):
        """Initialize split operation.

        Args:
            ratios: (train, validation, test) fractions summing to 1
            seed: Shuffle seed
        """
        super().__init__(ratios=ratios, seed=seed)
        self.ratios = tuple(ratios)
        self.seed = seed

    def apply(self, pack):
        train, validation, test = split_dataset(pack.dataset, self.ratios, self.seed)
        new_pack = pack.copy()
        new_pack.add_context(SplitContextData(train, validation, test, self.ratios, self.seed))
        return new_pack


def training_sets(pack):
    """(train, validation) from the split context, or the whole dataset without validation."""
    split = pack.get_context('split')
    if split is None:
        return pack.dataset, None
    return split.train, split.validation


def evaluation_set(pack):
    """The test split if the pack was split, else the whole dataset."""
    split = pack.get_context('split')
    return pack.dataset if split is None else split.test
