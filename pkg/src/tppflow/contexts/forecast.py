from ..core.context import ContextData


class ForecastContextData(ContextData):
    """Deterministic multi-step forecasts and their per-step errors."""

    def __init__(self, score, forecasts, mean_gap: float):
        """Initialize forecast context data.

        Args:
            score: ForecastScore with model and naive per-step MAE
            forecasts: Mapping of sequence id to forecast events
            mean_gap: Step of the naive baseline (training mean gap)
        """
        self.score = score
        self.forecasts = forecasts
        self.mean_gap = mean_gap

    def to_dict(self):
        return {**self.score.to_dict(), 'naive_mean_gap': self.mean_gap}
