from ..autodiff import load_checkpoint
from ..core.errors import CheckpointError
from ..core.operation import Operation
from ..contexts.fit import FitContextData
from ..models.imtpp import ImtppModel
from ..models.mtpp import MtppModel
from ..models.training import LossTrace

MODEL_KINDS = {'mtpp': MtppModel, 'imtpp': ImtppModel}


def load_model(path):
    """Load an MTPP or IMTPP checkpoint, dispatching on its recorded kind.

    Raises:
        CheckpointError: If the kind is unknown or the file is not a checkpoint
    """
    _, metadata = load_checkpoint(path)
    kind = metadata.get('kind')
    if kind not in MODEL_KINDS:
        raise CheckpointError(f"{path}: unknown model kind {kind!r}")
    return MODEL_KINDS[kind].load(path), kind


@FitContextData.register_as_producer
@Operation.register
class LoadModelOperation(Operation):
    """
    Attach a saved model to the pack as if it had just been fitted.
    """

    def __init__(self, path):
        super().__init__(path=path)
        self.path = path

    def apply(self, pack):
        model, kind = load_model(self.path)
        new_pack = pack.copy()
        new_pack.add_context(FitContextData(model, LossTrace(), kind=kind))
        return new_pack
