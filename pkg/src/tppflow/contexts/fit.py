from ..core.context import ContextData


class FitContextData(ContextData):
    """A trained (or loaded) model with its training curve.

    `kind` is 'mtpp' or 'imtpp'.
    """

    def __init__(self, model, trace, kind: str = 'mtpp', train_size: int = 0):
        """Initialize fit context data.

        Args:
            model: MtppModel or ImtppModel
            trace: LossTrace of the run (empty for a loaded checkpoint)
            kind: Model family
            train_size: Number of training sequences
        """
        self.model = model
        self.trace = trace
        self.kind = kind
        self.train_size = train_size

    def to_dict(self):
        return {
            'kind': self.kind,
            'epochs': len(self.trace),
            'final_train_loss': self.trace.train[-1] if len(self.trace) else None,
            'train_size': self.train_size,
            'parameters': self.model.store.num_parameters,
        }
