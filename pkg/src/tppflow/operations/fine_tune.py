from dataclasses import replace

from ..core.operation import Operation
from ..contexts.fit import FitContextData
from ..contexts.transfer import TransferContextData
from ..models.mtpp import ModelConfig, MtppModel, train
from ..models.training import TrainConfig
from ..models.transfer import TransferConfig, epochs_to_threshold, fine_tune, time_nll_curve
from .split import training_sets


@TransferContextData.register_as_producer
@FitContextData.register_as_producer
@Operation.register
class FineTuneOperation(Operation):
    """
    Fine-tune a source model on the pack's (target) dataset.

    With `compare_scratch=True` a model with the same architecture is also
    trained from scratch on the target for the same number of epochs, and
    both runs report the first epoch whose validation time NLL reaches the
    scratch run's final value.
    """

    def __init__(self, source_model, transfer_config=None, train_config=None, source_trace=None,
                 compare_scratch=False):
        """Initialize fine-tune operation.

        Args:
            source_model: Trained MtppModel from the source region
            transfer_config: TransferConfig (defaults apply when None)
            train_config: Base TrainConfig; the learning rate is scaled by the multiplier
            source_trace: LossTrace of the source run, kept for reporting
            compare_scratch: Also train a from-scratch baseline on the target
        """
        super().__init__(transfer_config=transfer_config, train_config=train_config,
                         compare_scratch=compare_scratch)
        if not isinstance(source_model, MtppModel):
            raise TypeError(f"source_model must be an MtppModel, got {type(source_model).__name__}")
        self.source_model = source_model
        self.transfer_config = transfer_config or TransferConfig()
        self.train_config = train_config or TrainConfig()
        self.source_trace = source_trace
        self.compare_scratch = compare_scratch

    def _scratch(self, target, validation, epochs):
        config = replace(self.train_config, epochs=epochs)
        model = MtppModel.for_dataset(target, ModelConfig(**self.source_model.metadata()['model']),
                                      seed=config.seed, weights=config.weights)
        return train(model, target, config, validation)[1]

    def apply(self, pack):
        target, validation = training_sets(pack)
        model, trace = fine_tune(self.source_model, target, self.transfer_config, self.train_config, validation)
        scratch_trace = tuned_epochs = scratch_epochs = None
        if self.compare_scratch:
            scratch_trace = self._scratch(target, validation, len(trace))
            scratch_curve = time_nll_curve(scratch_trace)
            if scratch_curve and scratch_curve[-1] is not None:
                threshold = scratch_curve[-1]
                tuned_epochs = epochs_to_threshold(time_nll_curve(trace), threshold)
                scratch_epochs = epochs_to_threshold(scratch_curve, threshold)
        context = TransferContextData(
            self.source_model, self.source_trace, trace,
            freeze=self.transfer_config.freeze,
            lr_multiplier=self.transfer_config.lr_multiplier,
            scratch_trace=scratch_trace,
            epochs_to_threshold=tuned_epochs,
            scratch_epochs_to_threshold=scratch_epochs,
        )
        new_pack = pack.copy()
        new_pack.add_context(FitContextData(model, trace, kind='mtpp', train_size=len(target)))
        new_pack.add_context(context)
        return new_pack
