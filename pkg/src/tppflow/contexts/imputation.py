from ..core.context import ContextData


class ImputationContextData(ContextData):
    """Datasets with inserted events: the model's and the uniform baseline's."""

    def __init__(self, imputed, baseline=None, samples_per_gap: int = 5, seed: int = 0):
        self.imputed = imputed
        self.baseline = baseline
        self.samples_per_gap = samples_per_gap
        self.seed = seed

    @property
    def num_imputed(self) -> int:
        return sum(event.imputed for seq in self.imputed for event in seq)

    def to_dict(self):
        return {'num_imputed': self.num_imputed, 'samples_per_gap': self.samples_per_gap, 'seed': self.seed}
