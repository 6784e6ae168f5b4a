from typing import Optional

from ..core.context import ContextData


class TransferContextData(ContextData):
    """Source and target curves of a fine-tuning run.

    `scratch_trace` is the optional from-scratch baseline trained on the
    target with the same budget.
    """

    def __init__(self, source_model, source_trace, target_trace, freeze=(), lr_multiplier: float = 0.1,
                 scratch_trace=None, epochs_to_threshold: Optional[int] = None,
                 scratch_epochs_to_threshold: Optional[int] = None):
        self.source_model = source_model
        self.source_trace = source_trace
        self.target_trace = target_trace
        self.freeze = sorted(freeze)
        self.lr_multiplier = lr_multiplier
        self.scratch_trace = scratch_trace
        self.epochs_to_threshold = epochs_to_threshold
        self.scratch_epochs_to_threshold = scratch_epochs_to_threshold

    def to_dict(self):
        return {
            'freeze': self.freeze,
            'lr_multiplier': self.lr_multiplier,
            'source_epochs': len(self.source_trace) if self.source_trace is not None else 0,
            'target_epochs': len(self.target_trace),
            'epochs_to_threshold': self.epochs_to_threshold,
            'scratch_epochs_to_threshold': self.scratch_epochs_to_threshold,
        }
