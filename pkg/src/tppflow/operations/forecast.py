from ..core.operation import Operation
from ..contexts.forecast import ForecastContextData
from ..harness.metrics import evaluate_forecast
from ..models.mtpp import global_mean_gap
from .split import evaluation_set, training_sets


@ForecastContextData.register_as_producer
@Operation.register
class ForecastOperation(Operation):
    """
    Roll the fitted model forward over the last `horizon` events of each test sequence.
    """

    def __init__(self, horizon=5, seed=0):
        """Initialize forecast operation.

        Args:
            horizon: Number of events to forecast per sequence
            seed: Seed passed to the rollout (unused by the deterministic path's draws)
        """
        super().__init__(horizon=horizon, seed=seed)
        if horizon < 1:
            raise ValueError(f"horizon must be >= 1, got {horizon}")
        self.horizon = horizon
        self.seed = seed

    def apply(self, pack):
        fit = pack.require_context('fit', self.name)
        mean_gap = global_mean_gap(training_sets(pack)[0])
        score, forecasts = evaluate_forecast(fit.model, evaluation_set(pack), self.horizon, mean_gap, self.seed)
        new_pack = pack.copy()
        new_pack.add_context(ForecastContextData(score, forecasts, mean_gap))
        return new_pack
