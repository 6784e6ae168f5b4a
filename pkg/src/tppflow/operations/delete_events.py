import logging

from ..core.events import delete_events
from ..core.noise import sequence_seed
from ..core.operation import Operation
from ..contexts.deletion import DeletionContextData

logger = logging.getLogger(__name__)


@DeletionContextData.register_as_producer
@Operation.register
class DeleteEventsOperation(Operation):
    """
    Remove a random fraction of each sequence's interior events.

    The returned pack carries the observed events; the removed ones are kept
    in the deletion context as imputation ground truth.
    """

    def __init__(self, fraction=0.3, seed=0):
        super().__init__(fraction=fraction, seed=seed)
        self.fraction = fraction
        self.seed = seed

    def apply(self, pack):
        observed, deleted = [], {}
        for seq in pack.dataset:
            kept, removed = delete_events(seq, self.fraction, sequence_seed(self.seed, seq.id))
            observed.append(kept)
            deleted[seq.id] = removed
        context = DeletionContextData(pack.dataset, deleted, self.fraction, self.seed)
        logger.info("deleted %d of %d events", context.num_deleted, pack.dataset.num_events)
        new_pack = pack.copy(new_dataset=pack.dataset.with_sequences(observed))
        new_pack.add_context(context)
        return new_pack
