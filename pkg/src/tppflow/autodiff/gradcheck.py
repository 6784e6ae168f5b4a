import logging
import math
from typing import Callable, Iterable, Optional

import numpy as np

from ..core.errors import NonFiniteError
from .params import ParamStore
from .tape import Tape, Var, backward

logger = logging.getLogger(__name__)

RELATIVE_FLOOR = 1e-8


def _evaluate(f: Callable[[Tape], Var], store: ParamStore) -> float:
    value = float(f(Tape(store)).value)
    if not math.isfinite(value):
        raise NonFiniteError(f"grad_check: objective evaluated to {value}")
    return value


def grad_check(f: Callable[[Tape], Var], store: ParamStore, step: float = 1e-5,
               names: Optional[Iterable[str]] = None, floor: float = RELATIVE_FLOOR) -> float:
    """Compare tape gradients against central finite differences.

    Args:
        f: Builds a scalar objective on the tape it is given; must be deterministic
        store: Parameters to differentiate; perturbed in place and restored
        step: Finite-difference half-width
        names: Restrict the check to these parameters (all by default)
        floor: Lower bound of the relative-error denominator

    Returns:
        max |a - n| / max(|a|, |n|, floor) over every checked entry
    """
    if step <= 0:
        raise ValueError(f"step must be positive, got {step}")
    names = list(store) if names is None else list(names)

    saved = {name: store.grad(name).copy() for name in store}
    store.zero_grad()
    tape = Tape(store)
    root = f(tape)
    if not math.isfinite(float(root.value)):
        raise NonFiniteError(f"grad_check: objective evaluated to {float(root.value)}")
    backward(tape, root)
    analytic = {name: store.grad(name).copy() for name in names}
    store.zero_grad()
    for name, grad in saved.items():
        store.accumulate(name, grad)

    worst = 0.0
    for name in names:
        values = store[name]
        for index in np.ndindex(values.shape):
            original = values[index]
            values[index] = original + step
            upper = _evaluate(f, store)
            values[index] = original - step
            lower = _evaluate(f, store)
            values[index] = original
            numeric = (upper - lower) / (2.0 * step)
            exact = analytic[name][index]
            error = abs(exact - numeric) / max(abs(exact), abs(numeric), floor)
            worst = max(worst, error)
    logger.debug("grad_check over %d tensors: max relative error %.3g", len(names), worst)
    return worst
