"""Source-to-target fine-tuning of the base MTPP.

The encoder and the time/distance heads only see Δt, Δd and mark
embeddings, so they carry over between regions; the mark vocabulary does
not, and the mark head with its embedding is re-initialized on the target.
"""
import logging
from dataclasses import dataclass, field, replace
from typing import FrozenSet, Optional, Sequence as SequenceType, Tuple

from ..core.errors import ConfigError
from ..core.events import Dataset
from .mtpp import COMPONENTS, ModelConfig, MtppModel, train
from .training import LossTrace, TrainConfig

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TransferConfig:
    """Fine-tuning settings.

    Attributes:
        source: Path of the source dataset (resolved by the harness)
        target: Path of the target dataset
        lr_multiplier: Target learning rate relative to the source run
        freeze: Components excluded from updates on the target
        target_epochs: Target epochs; None reuses the source epoch count
        seed: Seed of the re-initialized mark head
    """

    source: Optional[str] = None
    target: Optional[str] = None
    lr_multiplier: float = 0.1
    freeze: FrozenSet[str] = field(default_factory=frozenset)
    target_epochs: Optional[int] = None
    seed: int = 0

    def __post_init__(self):
        freeze = self.freeze
        if isinstance(freeze, str):
            freeze = [part.strip() for part in freeze.split(',') if part.strip()]
        freeze = frozenset(freeze)
        object.__setattr__(self, 'freeze', freeze)
        if not self.lr_multiplier > 0:
            raise ConfigError(f"lr_multiplier must be positive, got {self.lr_multiplier}",
                              key='transfer.lr_multiplier')
        unknown = sorted(freeze - set(COMPONENTS))
        if unknown:
            raise ConfigError(f"unknown components {unknown}; expected a subset of {COMPONENTS}",
                              key='transfer.freeze')
        if freeze == set(COMPONENTS):
            raise ConfigError("at least one component must stay trainable", key='transfer.freeze')
        if self.target_epochs is not None and self.target_epochs < 0:
            raise ConfigError(f"target_epochs must be >= 0, got {self.target_epochs}",
                              key='transfer.target_epochs')


def train_source(dataset: Dataset, model_config: ModelConfig = ModelConfig(),
                 train_config: TrainConfig = TrainConfig(),
                 validation: Optional[Dataset] = None) -> Tuple[MtppModel, LossTrace]:
    """Train the source model; plain `mtpp.train` from a fresh initialization."""
    if len(dataset) == 0:
        raise ValueError("source dataset is empty")
    model = MtppModel.for_dataset(dataset, model_config, seed=train_config.seed, weights=train_config.weights)
    logger.info("training source model on %d sequences", len(dataset))
    return train(model, dataset, train_config, validation)


def frozen_params(model: MtppModel, components: SequenceType[str]) -> list:
    return [name for component in components for name in model.component_params(component)]


def fine_tune(source_model: MtppModel, target: Dataset, transfer_config: TransferConfig = TransferConfig(),
              train_config: TrainConfig = TrainConfig(),
              validation: Optional[Dataset] = None) -> Tuple[MtppModel, LossTrace]:
    """Adapt a source model to a target dataset.

    The source model is left untouched. Frozen components keep their values
    bit for bit; the rest train at `learning_rate * lr_multiplier`.

    Raises:
        ValueError: If the target dataset is empty
    """
    if len(target) == 0:
        raise ValueError("target dataset is empty")
    model = source_model.retarget(target.vocab, seed=transfer_config.seed)
    model.store.reset_optimizer()
    if source_model.has_locations and not target.has_locations:
        model = temporal_only_mode(model)
    names = frozen_params(model, sorted(transfer_config.freeze))
    epochs = train_config.epochs if transfer_config.target_epochs is None else transfer_config.target_epochs
    config = replace(train_config, epochs=epochs,
                     learning_rate=train_config.learning_rate * transfer_config.lr_multiplier)
    logger.info("fine-tuning on %d target sequences, frozen=%s, lr=%g",
                len(target), sorted(transfer_config.freeze), config.learning_rate)
    model.store.freeze(names)
    try:
        tuned, trace = train(model, target, config, validation)
    finally:
        model.store.unfreeze(names)
    tuned.store.unfreeze(names)
    return tuned, trace


def temporal_only_mode(model: MtppModel, enabled: bool = True) -> MtppModel:
    """Switch the distance head and its loss term off (or back on)."""
    return model.temporal_only(enabled)


def epochs_to_threshold(values, threshold: float) -> Optional[int]:
    """First 1-based epoch whose value is at or below `threshold`, or None."""
    for epoch, value in enumerate(values, start=1):
        if value is not None and value <= threshold:
            return epoch
    return None


def time_nll_curve(trace: LossTrace) -> list:
    return [components['time'] for components in trace.validation_components]
