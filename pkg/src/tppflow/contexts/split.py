from ..core.context import ContextData


class SplitContextData(ContextData):
    """Train/validation/test partition of the pack's dataset."""

    def __init__(self, train, validation, test, ratios=(0.8, 0.1, 0.1), seed: int = 0):
        """Initialize split context data.

        Args:
            train: Training Dataset
            validation: Validation Dataset
            test: Test Dataset
            ratios: The (train, validation, test) fractions used
            seed: Seed of the shuffle
        """
        self.train = train
        self.validation = validation
        self.test = test
        self.ratios = tuple(ratios)
        self.seed = seed

    def to_dict(self):
        return {
            'train': len(self.train),
            'validation': len(self.validation),
            'test': len(self.test),
            'ratios': list(self.ratios),
            'seed': self.seed,
        }
