from ..core.operation import Operation
from ..contexts.fit import FitContextData
from ..models.mtpp import ModelConfig, MtppModel, train
from ..models.training import TrainConfig
from .split import training_sets


@FitContextData.register_as_producer
@Operation.register
class FitOperation(Operation):
    """
    Train the base MTPP on the training split (or the whole dataset).
    """

    def __init__(self, model_config=None, train_config=None, temporal_only=False):
        """Initialize fit operation.

        Args:
            model_config: ModelConfig (defaults apply when None)
            train_config: TrainConfig (defaults apply when None)
            temporal_only: Drop the distance term even if the data has locations
        """
        super().__init__(model_config=model_config, train_config=train_config, temporal_only=temporal_only)
        self.model_config = model_config or ModelConfig()
        self.train_config = train_config or TrainConfig()
        self.temporal_only = temporal_only

    def apply(self, pack):
        train_set, validation = training_sets(pack)
        model = MtppModel.for_dataset(train_set, self.model_config, seed=self.train_config.seed,
                                      weights=self.train_config.weights)
        if self.temporal_only:
            model = model.temporal_only()
        model, trace = train(model, train_set, self.train_config, validation)
        new_pack = pack.copy()
        new_pack.add_context(FitContextData(model, trace, kind='mtpp', train_size=len(train_set)))
        return new_pack
