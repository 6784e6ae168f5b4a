import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np
import pandas as pd

from ..autodiff import ParamStore, Tape, Var, adam_step, backward, clip_grad_norm
from ..core.errors import ConfigError, NonFiniteError
from ..core.events import Sequence
from ..core.noise import NoiseStream

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class LossWeights:
    """Weights of the mark, time and distance terms of the joint objective."""

    mark: float = 1.0
    time: float = 1.0
    dist: float = 1.0

    def __post_init__(self):
        values = (self.mark, self.time, self.dist)
        if any(w < 0 or not math.isfinite(w) for w in values):
            raise ConfigError(f"loss weights must be finite and >= 0, got {values}", key='train.weights')
        if all(w == 0 for w in values):
            raise ConfigError("at least one loss weight must be positive", key='train.weights')


@dataclass(frozen=True)
class TrainConfig:
    """Minibatch Adam settings shared by every trainable model."""

    epochs: int = 20
    batch_size: int = 16
    learning_rate: float = 1e-2
    betas: Tuple[float, float] = (0.9, 0.999)
    eps: float = 1e-8
    seed: int = 0
    clip_norm: Optional[float] = 5.0
    weights: LossWeights = field(default_factory=LossWeights)

    def __post_init__(self):
        if self.epochs < 0:
            raise ConfigError(f"epochs must be >= 0, got {self.epochs}", key='train.epochs')
        if self.batch_size < 1:
            raise ConfigError(f"batch_size must be >= 1, got {self.batch_size}", key='train.batch_size')
        if not self.learning_rate > 0:
            raise ConfigError(f"learning_rate must be positive, got {self.learning_rate}",
                              key='train.learning_rate')
        if len(self.betas) != 2 or not all(0 <= b < 1 for b in self.betas):
            raise ConfigError(f"betas must be two numbers in [0, 1), got {self.betas}", key='train.betas')
        if self.clip_norm is not None and not self.clip_norm > 0:
            raise ConfigError(f"clip_norm must be positive, got {self.clip_norm}", key='train.clip_norm')
        object.__setattr__(self, 'betas', tuple(float(b) for b in self.betas))
        if isinstance(self.weights, dict):
            object.__setattr__(self, 'weights', LossWeights(**self.weights))


@dataclass
class LossTrace:
    """Per-epoch training curve.

    Attributes:
        train: Mean per-sequence loss over each epoch's batches
        validation: Loss on the validation set after each epoch (empty without one)
        validation_components: Per-event mark/time/dist NLL on validation after each epoch
    """

    train: List[float] = field(default_factory=list)
    validation: List[float] = field(default_factory=list)
    validation_components: List[Dict[str, Optional[float]]] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.train)

    def to_frame(self, prefix: str = '') -> pd.DataFrame:
        """Long-format curve table with columns epoch, split, value."""
        rows = []
        for name, values in (('train', self.train), ('validation', self.validation)):
            rows += [{'epoch': epoch, 'split': prefix + name, 'value': value}
                     for epoch, value in enumerate(values, start=1)]
        return pd.DataFrame(rows, columns=['epoch', 'split', 'value'])


Objective = Callable[[Tape, Sequence, NoiseStream], Var]
Validator = Callable[[], Tuple[float, Dict[str, Optional[float]]]]


def fit_store(store: ParamStore, sequences: List[Sequence], objective: Objective,
              config: TrainConfig, validate: Optional[Validator] = None,
              label: str = 'model') -> LossTrace:
    """Run minibatch Adam over `sequences`, minimizing the mean of `objective`.

    Each sequence gets its own noise stream, drawn from the seeded training
    generator in a fixed order, so a seed reproduces the trace bit for bit.

    Raises:
        NonFiniteError: If a sequence yields a non-finite loss, naming the sequence
    """
    trace = LossTrace()
    if config.epochs == 0:
        return trace
    if not sequences:
        raise ValueError(f"{label}: no trainable sequences")

    rng = np.random.default_rng(config.seed)
    for epoch in range(1, config.epochs + 1):
        order = rng.permutation(len(sequences))
        epoch_total = 0.0
        for start in range(0, len(order), config.batch_size):
            batch = [sequences[i] for i in order[start:start + config.batch_size]]
            store.zero_grad()
            for seq in batch:
                noise = NoiseStream(int(rng.integers(0, 2**63 - 1)))
                tape = Tape(store)
                try:
                    loss = objective(tape, seq, noise)
                except NonFiniteError as e:
                    raise NonFiniteError(f"{label}: sequence {seq.id!r}: {e}") from e
                value = float(loss.value)
                if not math.isfinite(value):
                    raise NonFiniteError(f"{label}: non-finite loss {value} on sequence {seq.id!r}")
                backward(tape, loss / len(batch))
                epoch_total += value
            if config.clip_norm is not None:
                clip_grad_norm(store, config.clip_norm)
            adam_step(store, config.learning_rate, config.betas, config.eps)
        trace.train.append(epoch_total / len(sequences))
        if validate is not None:
            loss, components = validate()
            trace.validation.append(loss)
            trace.validation_components.append(components)
            logger.info("%s epoch %d: train %.5f validation %.5f", label, epoch, trace.train[-1], loss)
        else:
            logger.info("%s epoch %d: train %.5f", label, epoch, trace.train[-1])
    return trace
