from ..core.operation import Operation
from ..contexts.metrics import MetricsContextData
from ..harness.metrics import evaluate, evaluate_imputation_dataset
from ..models.imtpp import elbo_curve
from .split import evaluation_set


@MetricsContextData.register_as_producer
@Operation.register
class EvaluateOperation(Operation):
    """
    Score the fitted model on the test split (or the whole dataset).

    Imputation metrics are added when the pack carries both an imputation
    and a deletion context.
    """

    def apply(self, pack):
        fit = pack.require_context('fit', self.name)
        split = 'test' if pack.has_context('split') else 'all'
        report = evaluate(fit.model, evaluation_set(pack))
        if fit.kind == 'imtpp' and len(fit.trace):
            report.elbo_final = elbo_curve(fit.trace)[-1]

        imputation = pack.get_context('imputation')
        deletion = pack.get_context('deletion')
        if imputation is not None and deletion is not None:
            section = evaluate_imputation_dataset(imputation.imputed, deletion.deleted).to_dict()
            if imputation.baseline is not None:
                baseline = evaluate_imputation_dataset(imputation.baseline, deletion.deleted)
                section['baseline'] = baseline.to_dict()
            report.sections['imputation'] = section
        elif imputation is not None:
            pack.log_missing_contexts(['deletion'], self.name)

        new_pack = pack.copy()
        new_pack.add_context(MetricsContextData(report, split))
        return new_pack
