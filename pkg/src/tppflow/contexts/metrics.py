from ..core.context import ContextData


class MetricsContextData(ContextData):
    """Holds the MetricsReport of an evaluation."""

    def __init__(self, report, split: str = 'test'):
        self.report = report
        self.split = split

    def to_dict(self):
        return {'split': self.split, **self.report.to_dict()}
