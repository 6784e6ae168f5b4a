import logging

from ..core.operation import Operation
from ..contexts.hawkes import HawkesContextData
from ..models.hawkes import HawkesFitConfig, fit_mle, nll

logger = logging.getLogger(__name__)


@HawkesContextData.register_as_producer
@Operation.register
class FitHawkesOperation(Operation):
    """
    Fit base rates and the shared excitation matrix by maximum likelihood.

    Marks are users. The horizon defaults to the pack's `horizon` keyword
    context, then to the latest event time.
    """

    def __init__(self, beta=1.0, horizon=None, num_users=None, fit_config=None, truth=None):
        super().__init__(beta=beta, horizon=horizon, num_users=num_users, fit_config=fit_config)
        self.beta = beta
        self.horizon = horizon
        self.num_users = num_users
        self.fit_config = fit_config or HawkesFitConfig()
        self.truth = truth

    def apply(self, pack):
        sequences = list(pack.dataset)
        horizon = self.horizon or pack.context.get('horizon')
        if horizon is None:
            horizon = max(seq[-1].time for seq in sequences if len(seq))
        num_users = self.num_users or pack.dataset.num_marks
        fit = fit_mle(sequences, num_users, self.beta, horizon, self.fit_config)
        events = max(pack.dataset.num_events, 1)
        nll_per_event = nll(fit.params, sequences, horizon) / events
        logger.info("fitted Hawkes process over %d users: NLL per event %.5f", num_users, nll_per_event)
        new_pack = pack.copy()
        new_pack.add_context(HawkesContextData(fit.params, horizon, fit.losses, nll_per_event, self.truth))
        return new_pack
