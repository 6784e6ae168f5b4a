import json
import logging
from typing import Dict, Iterable, Iterator, Optional, Tuple

import numpy as np

from ..core.errors import CheckpointError, ShapeError

logger = logging.getLogger(__name__)

CHECKPOINT_MAGIC = 'tppflow-params/1'
_PARAM_PREFIX = 'param/'


class ParamStore:
    """Named float64 parameter tensors with gradient accumulators and Adam moments.

    `store[name]` returns the live array; in-place edits are seen by the next tape.
    """

    def __init__(self):
        self._values: Dict[str, np.ndarray] = {}
        self._grads: Dict[str, np.ndarray] = {}
        self._first: Dict[str, np.ndarray] = {}
        self._second: Dict[str, np.ndarray] = {}
        self._frozen = set()
        self.step_count = 0

    def __contains__(self, name) -> bool:
        return name in self._values

    def __getitem__(self, name: str) -> np.ndarray:
        try:
            return self._values[name]
        except KeyError:
            raise KeyError(f"unknown parameter {name!r}") from None

    def __iter__(self) -> Iterator[str]:
        return iter(self._values)

    def __len__(self) -> int:
        return len(self._values)

    def _require(self, name: str) -> None:
        if name not in self._values:
            raise KeyError(f"unknown parameter {name!r}")

    def names(self, prefix: str = '') -> list:
        return [name for name in self._values if name.startswith(prefix)]

    @property
    def num_parameters(self) -> int:
        return sum(value.size for value in self._values.values())

    def _reset_state(self, name: str) -> None:
        shape = self._values[name].shape
        self._grads[name] = np.zeros(shape)
        self._first[name] = np.zeros(shape)
        self._second[name] = np.zeros(shape)

    def add(self, name: str, value) -> np.ndarray:
        if name in self._values:
            raise ValueError(f"parameter {name!r} already exists")
        self._values[name] = np.array(value, dtype=np.float64)
        self._reset_state(name)
        return self._values[name]

    def set(self, name: str, value) -> None:
        value = np.asarray(value, dtype=np.float64)
        if value.shape != self[name].shape:
            raise ShapeError(f"parameter {name!r}: expected shape {self[name].shape}, got {value.shape}")
        self._values[name][...] = value

    def replace(self, name: str, value) -> None:
        """Swap in a tensor of possibly different shape, clearing its gradient and moments."""
        self._require(name)
        self._values[name] = np.array(value, dtype=np.float64)
        self._reset_state(name)

    def grad(self, name: str) -> np.ndarray:
        return self._grads[name]

    def accumulate(self, name: str, grad) -> None:
        grad = np.asarray(grad, dtype=np.float64)
        if grad.shape != self[name].shape:
            raise ShapeError(f"gradient for {name!r}: expected shape {self[name].shape}, got {grad.shape}")
        self._grads[name] += grad

    def zero_grad(self) -> None:
        for grad in self._grads.values():
            grad.fill(0.0)

    def moments(self, name: str) -> Tuple[np.ndarray, np.ndarray]:
        return self._first[name], self._second[name]

    def reset_optimizer(self) -> None:
        """Clear Adam moments and the step counter, keeping values."""
        for name in self._values:
            self._reset_state(name)
        self.step_count = 0

    def freeze(self, names: Iterable[str]) -> None:
        for name in names:
            self._require(name)
            self._frozen.add(name)

    def unfreeze(self, names: Optional[Iterable[str]] = None) -> None:
        if names is None:
            self._frozen.clear()
        else:
            self._frozen.difference_update(names)

    def is_frozen(self, name: str) -> bool:
        return name in self._frozen

    @property
    def frozen(self) -> frozenset:
        return frozenset(self._frozen)

    def values(self) -> Dict[str, np.ndarray]:
        return {name: value.copy() for name, value in self._values.items()}

    def copy(self) -> 'ParamStore':
        clone = ParamStore()
        for name, value in self._values.items():
            clone._values[name] = value.copy()
            clone._grads[name] = self._grads[name].copy()
            clone._first[name] = self._first[name].copy()
            clone._second[name] = self._second[name].copy()
        clone._frozen = set(self._frozen)
        clone.step_count = self.step_count
        return clone


def save_checkpoint(store: ParamStore, file, metadata: Optional[dict] = None) -> None:
    """Write parameters to an .npz archive with a versioned magic string.

    Args:
        store: Parameters to write
        file: Path or binary file object
        metadata: JSON-serializable dictionary stored alongside the tensors
    """
    arrays = {_PARAM_PREFIX + name: value for name, value in store._values.items()}
    np.savez(
        file,
        __magic__=np.array(CHECKPOINT_MAGIC),
        __metadata__=np.array(json.dumps(metadata or {}, sort_keys=True)),
        **arrays,
    )


def load_checkpoint(file, store: Optional[ParamStore] = None) -> Tuple[ParamStore, dict]:
    """Read a checkpoint written by `save_checkpoint`.

    When `store` is given its parameters are overwritten in place and every
    name and shape must match.

    Raises:
        CheckpointError: On a missing or wrong magic string, missing names or
            mismatched shapes
    """
    try:
        archive = np.load(file, allow_pickle=False)
    except (ValueError, OSError) as e:
        raise CheckpointError(f"cannot read checkpoint: {e}") from e
    with archive:
        if '__magic__' not in archive.files or str(archive['__magic__']) != CHECKPOINT_MAGIC:
            raise CheckpointError(f"not a {CHECKPOINT_MAGIC} checkpoint")
        metadata = json.loads(str(archive['__metadata__'])) if '__metadata__' in archive.files else {}
        loaded = {
            key[len(_PARAM_PREFIX):]: archive[key]
            for key in archive.files if key.startswith(_PARAM_PREFIX)
        }

    if store is None:
        store = ParamStore()
        for name, value in loaded.items():
            store.add(name, value)
        return store, metadata

    missing = [name for name in store if name not in loaded]
    if missing:
        raise CheckpointError(f"checkpoint lacks parameters {missing}")
    for name in store:
        if loaded[name].shape != store[name].shape:
            raise CheckpointError(
                f"parameter {name!r}: checkpoint shape {loaded[name].shape} "
                f"does not match {store[name].shape}"
            )
    for name in store:
        store.set(name, loaded[name])
    logger.debug("loaded %d parameters from checkpoint", len(loaded))
    return store, metadata
