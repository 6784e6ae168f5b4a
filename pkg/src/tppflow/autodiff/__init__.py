"""Reverse-mode automatic differentiation over float64 numpy arrays."""

from .gradcheck import grad_check
from .optim import adam_step, clip_grad_norm, grad_norm
from .params import CHECKPOINT_MAGIC, ParamStore, load_checkpoint, save_checkpoint
from .primitives import Primitive
from .tape import Node, Tape, Var, backward
from . import ops

__all__ = [
    'Tape', 'Var', 'Node', 'backward', 'Primitive', 'ParamStore',
    'save_checkpoint', 'load_checkpoint', 'CHECKPOINT_MAGIC',
    'adam_step', 'clip_grad_norm', 'grad_norm', 'grad_check', 'ops',
]
