import logging

from ..core.operation import Operation
from ..contexts.imputation import ImputationContextData
from ..models.imtpp import impute_dataset, uniform_imputation
from .split import evaluation_set

logger = logging.getLogger(__name__)


@ImputationContextData.register_as_producer
@Operation.register
class ImputeOperation(Operation):
    """
    Fill the observed gaps of the evaluation sequences with posterior samples.

    Also builds the uniform baseline, spaced for the deletion fraction when a
    deletion context is present.
    """

    def __init__(self, samples_per_gap=None, seed=0):
        super().__init__(samples_per_gap=samples_per_gap, seed=seed)
        self.samples_per_gap = samples_per_gap
        self.seed = seed

    def apply(self, pack):
        fit = pack.require_context('fit', self.name)
        if fit.kind != 'imtpp':
            raise ValueError(f"{self.name} needs an imtpp model, found {fit.kind!r}. Run 'fit_imtpp' first.")
        model = fit.model
        samples = self.samples_per_gap or model.config.samples_per_gap
        target = evaluation_set(pack)
        imputed = impute_dataset(model, target, samples, self.seed)
        deletion = pack.get_context('deletion')
        fraction = deletion.fraction if deletion is not None else 0.0
        baseline = target.with_sequences(uniform_imputation(seq, fraction) for seq in target)
        context = ImputationContextData(imputed, baseline, samples, self.seed)
        logger.info("imputed %d events into %d sequences", context.num_imputed, len(target))
        new_pack = pack.copy()
        new_pack.add_context(context)
        return new_pack
