from ..core.operation import Operation
from ..contexts.fit import FitContextData
from ..models.imtpp import ImtppConfig, ImtppModel, train_imtpp
from ..models.mtpp import ModelConfig
from ..models.training import TrainConfig
from .split import training_sets


@FitContextData.register_as_producer
@Operation.register
class FitImtppOperation(Operation):
    """
    Train the missing-event model by maximizing the ELBO on the observed events.
    """

    def __init__(self, model_config=None, train_config=None, imtpp_config=None):
        super().__init__(model_config=model_config, train_config=train_config, imtpp_config=imtpp_config)
        self.model_config = model_config or ModelConfig()
        self.train_config = train_config or TrainConfig()
        self.imtpp_config = imtpp_config or ImtppConfig()

    def apply(self, pack):
        train_set, validation = training_sets(pack)
        model = ImtppModel.for_dataset(train_set, self.model_config, seed=self.train_config.seed,
                                       config=self.imtpp_config, weights=self.train_config.weights)
        model, trace = train_imtpp(model, train_set, self.train_config, validation)
        new_pack = pack.copy()
        new_pack.add_context(FitContextData(model, trace, kind='imtpp', train_size=len(train_set)))
        return new_pack
