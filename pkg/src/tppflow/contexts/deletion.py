from typing import Dict, List

from ..core.context import ContextData
from ..core.events import Event


class DeletionContextData(ContextData):
    """Events removed by synthetic MCAR deletion, kept as ground truth for imputation.

    `complete` is the dataset before deletion; `deleted` maps sequence id to
    the removed events in time order.
    """

    def __init__(self, complete, deleted: Dict[str, List[Event]], fraction: float, seed: int = 0):
        self.complete = complete
        self.deleted = deleted
        self.fraction = fraction
        self.seed = seed

    @property
    def num_deleted(self) -> int:
        return sum(len(events) for events in self.deleted.values())

    def to_dict(self):
        return {'fraction': self.fraction, 'seed': self.seed, 'num_deleted': self.num_deleted}
