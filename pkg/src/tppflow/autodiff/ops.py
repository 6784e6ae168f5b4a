"""Functional wrappers over the registered primitives.

Each function accepts Vars and plain numbers/arrays mixed freely, as long as at
least one argument is a Var (its tape records the operation).
"""
from .tape import Var


def _tape(*values):
    for value in values:
        if isinstance(value, Var):
            return value.tape
    raise TypeError("at least one argument must be a Var")


def add(a, b):
    return _tape(a, b).apply('add', a, b)


def sub(a, b):
    return _tape(a, b).apply('sub', a, b)


def mul(a, b):
    return _tape(a, b).apply('mul', a, b)


def div(a, b):
    return _tape(a, b).apply('div', a, b)


def neg(a):
    return _tape(a).apply('neg', a)


def square(a):
    return _tape(a).apply('square', a)


def sqrt(a):
    return _tape(a).apply('sqrt', a)


def exp(a):
    return _tape(a).apply('exp', a)


def log(a):
    return _tape(a).apply('log', a)


def tanh(a):
    return _tape(a).apply('tanh', a)


def sigmoid(a):
    return _tape(a).apply('sigmoid', a)


def softplus(a):
    return _tape(a).apply('softplus', a)


def log_ndtr(a):
    return _tape(a).apply('log_ndtr', a)


def ndtri(a):
    return _tape(a).apply('ndtri', a)


def logsumexp(a):
    return _tape(a).apply('logsumexp', a)


def reduce_sum(a, axis=None):
    return _tape(a).apply('sum', a, axis=axis)


def dot(a, b):
    return _tape(a, b).apply('dot', a, b)


def matvec(w, x):
    return _tape(w, x).apply('matvec', w, x)


def matmul(a, b):
    return _tape(a, b).apply('matmul', a, b)


def concat(*values):
    return _tape(*values).apply('concat', *values)


def stack(*values):
    return _tape(*values).apply('stack', *values)


def take(a, indices):
    return _tape(a).apply('take', a, indices=indices)


def pick(a, indices):
    return _tape(a).apply('pick', a, indices=indices)


def log_softmax(logits):
    """Normalized log-probabilities of a logit vector."""
    return logits - logsumexp(logits)


def affine(w, x, b):
    return matvec(w, x) + b
