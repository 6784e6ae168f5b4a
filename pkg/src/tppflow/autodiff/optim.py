import logging
from typing import Tuple

import numpy as np

from ..core.errors import NonFiniteError
from .params import ParamStore

logger = logging.getLogger(__name__)


def adam_step(store: ParamStore, lr: float, betas: Tuple[float, float] = (0.9, 0.999),
              eps: float = 1e-8) -> ParamStore:
    """Apply one bias-corrected Adam update to every unfrozen parameter.

    Gradients are zeroed afterwards, frozen ones included.

    Raises:
        NonFiniteError: If any gradient holds NaN or infinity; nothing is updated
    """
    for name in store:
        if not np.all(np.isfinite(store.grad(name))):
            raise NonFiniteError(f"non-finite gradient for parameter {name!r}")
    beta1, beta2 = betas
    store.step_count += 1
    step = store.step_count
    correction1 = 1.0 - beta1 ** step
    correction2 = 1.0 - beta2 ** step
    for name in store:
        if store.is_frozen(name):
            continue
        grad = store.grad(name)
        first, second = store.moments(name)
        first *= beta1
        first += (1.0 - beta1) * grad
        second *= beta2
        second += (1.0 - beta2) * grad * grad
        store[name][...] -= lr * (first / correction1) / (np.sqrt(second / correction2) + eps)
    store.zero_grad()
    return store


def grad_norm(store: ParamStore) -> float:
    total = sum(float(np.sum(store.grad(name) ** 2)) for name in store if not store.is_frozen(name))
    return float(np.sqrt(total))


def clip_grad_norm(store: ParamStore, max_norm: float) -> float:
    """Rescale unfrozen gradients so their global L2 norm is at most `max_norm`.

    Returns:
        The norm before clipping
    """
    norm = grad_norm(store)
    if norm > max_norm > 0:
        scale = max_norm / norm
        for name in store:
            if not store.is_frozen(name):
                store.grad(name)[...] *= scale
        logger.debug("clipped gradient norm %.4g to %.4g", norm, max_norm)
    return norm
