from ..core.context import ContextData


class HawkesContextData(ContextData):
    """Fitted (or generating) Hawkes parameters."""

    def __init__(self, params, horizon: float, losses=(), nll_per_event=None, truth=None):
        """Initialize Hawkes context data.

        Args:
            params: HawkesParams
            horizon: Observation window length of every sequence
            losses: Per-epoch per-event NLL of the fit
            nll_per_event: Final NLL divided by the number of events
            truth: Generating HawkesParams when known (simulated data)
        """
        self.params = params
        self.horizon = horizon
        self.losses = list(losses)
        self.nll_per_event = nll_per_event
        self.truth = truth

    def to_dict(self):
        return {
            'num_users': self.params.num_users,
            'beta': self.params.beta,
            'horizon': self.horizon,
            'spectral_radius': self.params.spectral_radius,
            'nll_per_event': self.nll_per_event,
            'epochs': len(self.losses),
        }
