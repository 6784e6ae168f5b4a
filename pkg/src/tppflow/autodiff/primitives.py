import re
from abc import ABC, abstractmethod
from typing import Dict, Tuple

import numpy as np
from scipy.special import expit, log_ndtr, ndtri, softmax

from ..core.errors import DomainError, ShapeError

_HALF_LOG_2PI = 0.5 * np.log(2.0 * np.pi)


def _unbroadcast(grad: np.ndarray, shape: Tuple[int, ...]) -> np.ndarray:
    """Sum a broadcast gradient back down to `shape`."""
    while grad.ndim > len(shape):
        grad = grad.sum(axis=0)
    for axis, size in enumerate(shape):
        if size == 1 and grad.shape[axis] != 1:
            grad = grad.sum(axis=axis, keepdims=True)
    return grad.reshape(shape)


class Primitive(ABC):
    """A differentiable operation recorded on a tape.

    Subclasses implement `forward` on plain arrays and `vjp`, which maps the
    gradient of the output to one gradient per input.
    """

    _registry: Dict[str, 'Primitive'] = {}

    @property
    def name(self) -> str:
        return Primitive._get_primitive_name(type(self))

    @staticmethod
    def _get_primitive_name(primitive_class) -> str:
        name = primitive_class.__name__
        name = re.sub(r'([A-Z]+)([A-Z][a-z])', r'\1_\2', name)
        name = re.sub(r'([a-z\d])([A-Z])', r'\1_\2', name).lower()
        if name.endswith('_primitive'):
            return name[:-len('_primitive')]
        return name

    @classmethod
    def register(cls, name_or_class=None):
        """Register a primitive so tapes can look it up by name.

        Usage:
        @Primitive.register
        class Exp(Primitive):
            ...
        """
        def _register_primitive(primitive_class, primitive_name=None):
            if primitive_name is None:
                primitive_name = Primitive._get_primitive_name(primitive_class)
            Primitive._registry[primitive_name] = primitive_class()
            return primitive_class

        if name_or_class is None:
            return lambda primitive_class: _register_primitive(primitive_class)
        if isinstance(name_or_class, str):
            return lambda primitive_class: _register_primitive(primitive_class, name_or_class)
        return _register_primitive(name_or_class)

    @classmethod
    def get(cls, name: str) -> 'Primitive':
        try:
            return cls._registry[name]
        except KeyError:
            raise KeyError(f"unknown primitive {name!r}; registered: {sorted(cls._registry)}") from None

    @classmethod
    def names(cls):
        return sorted(cls._registry)

    def check(self, *values, **attrs) -> None:
        """Validate input shapes and domains before the forward pass."""

    @abstractmethod
    def forward(self, *values, **attrs) -> np.ndarray:
        pass

    @abstractmethod
    def vjp(self, grad, values, out, **attrs) -> tuple:
        pass


class _Elementwise(Primitive):
    def check(self, a, b, **attrs):
        try:
            np.broadcast_shapes(a.shape, b.shape)
        except ValueError:
            raise ShapeError(f"{self.name}: cannot broadcast shapes {a.shape} and {b.shape}") from None


@Primitive.register
class Add(_Elementwise):
    def forward(self, a, b):
        return a + b

    def vjp(self, grad, values, out):
        a, b = values
        return _unbroadcast(grad, a.shape), _unbroadcast(grad, b.shape)


@Primitive.register
class Sub(_Elementwise):
    def forward(self, a, b):
        return a - b

    def vjp(self, grad, values, out):
        a, b = values
        return _unbroadcast(grad, a.shape), _unbroadcast(-grad, b.shape)


@Primitive.register
class Mul(_Elementwise):
    def forward(self, a, b):
        return a * b

    def vjp(self, grad, values, out):
        a, b = values
        return _unbroadcast(grad * b, a.shape), _unbroadcast(grad * a, b.shape)


@Primitive.register
class Div(_Elementwise):
    def forward(self, a, b):
        return a / b

    def vjp(self, grad, values, out):
        a, b = values
        return _unbroadcast(grad / b, a.shape), _unbroadcast(-grad * a / (b * b), b.shape)


@Primitive.register
class Neg(Primitive):
    def forward(self, a):
        return -a

    def vjp(self, grad, values, out):
        return (-grad,)


@Primitive.register
class Square(Primitive):
    def forward(self, a):
        return a * a

    def vjp(self, grad, values, out):
        return (2.0 * values[0] * grad,)


@Primitive.register
class Sqrt(Primitive):
    def check(self, a):
        if np.any(a < 0):
            raise DomainError(f"sqrt: negative input {a.min()}")

    def forward(self, a):
        return np.sqrt(a)

    def vjp(self, grad, values, out):
        return (grad / (2.0 * out),)


@Primitive.register
class Exp(Primitive):
    def forward(self, a):
        return np.exp(a)

    def vjp(self, grad, values, out):
        return (grad * out,)


@Primitive.register
class Log(Primitive):
    def check(self, a):
        if np.any(a <= 0):
            raise DomainError(f"log: non-positive input {a.min()}")

    def forward(self, a):
        return np.log(a)

    def vjp(self, grad, values, out):
        return (grad / values[0],)


@Primitive.register
class Tanh(Primitive):
    def forward(self, a):
        return np.tanh(a)

    def vjp(self, grad, values, out):
        return (grad * (1.0 - out * out),)


@Primitive.register
class Sigmoid(Primitive):
    def forward(self, a):
        return expit(a)

    def vjp(self, grad, values, out):
        return (grad * out * (1.0 - out),)


@Primitive.register
class Softplus(Primitive):
    def forward(self, a):
        return np.logaddexp(0.0, a)

    def vjp(self, grad, values, out):
        return (grad * expit(values[0]),)


@Primitive.register
class LogNdtr(Primitive):
    """log Phi(x) for the standard-normal CDF Phi, accurate far into both tails."""

    def forward(self, a):
        return log_ndtr(a)

    def vjp(self, grad, values, out):
        x = values[0]
        return (grad * np.exp(-0.5 * x * x - _HALF_LOG_2PI - out),)


@Primitive.register
class Ndtri(Primitive):
    """Inverse of the standard-normal CDF on (0, 1)."""

    def check(self, a):
        if np.any(a <= 0) or np.any(a >= 1):
            raise DomainError(f"ndtri: input outside (0, 1): {a.min()}..{a.max()}")

    def forward(self, a):
        return ndtri(a)

    def vjp(self, grad, values, out):
        return (grad * np.exp(0.5 * out * out + _HALF_LOG_2PI),)


@Primitive.register
class Logsumexp(Primitive):
    """Log-sum-exp over the last axis, stabilized by subtracting the maximum."""

    def check(self, a):
        if a.ndim == 0 or a.shape[-1] == 0:
            raise ShapeError(f"logsumexp: needs a non-empty last axis, got shape {a.shape}")

    def forward(self, a):
        peak = np.max(a, axis=-1, keepdims=True)
        return np.squeeze(peak, axis=-1) + np.log(np.sum(np.exp(a - peak), axis=-1))

    def vjp(self, grad, values, out):
        return (np.expand_dims(grad, -1) * softmax(values[0], axis=-1),)


@Primitive.register
class Sum(Primitive):
    def forward(self, a, axis=None):
        return np.sum(a, axis=axis)

    def vjp(self, grad, values, out, axis=None):
        a = values[0]
        if axis is not None:
            grad = np.expand_dims(grad, axis)
        return (np.broadcast_to(grad, a.shape).copy(),)


@Primitive.register
class Dot(Primitive):
    def check(self, a, b):
        if a.ndim != 1 or a.shape != b.shape:
            raise ShapeError(f"dot: expected two equal-length vectors, got {a.shape} and {b.shape}")

    def forward(self, a, b):
        return np.dot(a, b)

    def vjp(self, grad, values, out):
        a, b = values
        return grad * b, grad * a


@Primitive.register
class Matvec(Primitive):
    def check(self, w, x):
        if w.ndim != 2 or x.ndim != 1 or w.shape[1] != x.shape[0]:
            raise ShapeError(f"matvec: incompatible shapes {w.shape} and {x.shape}")

    def forward(self, w, x):
        return w @ x

    def vjp(self, grad, values, out):
        w, x = values
        return np.outer(grad, x), w.T @ grad


@Primitive.register
class Matmul(Primitive):
    def check(self, a, b):
        if a.ndim != 2 or b.ndim != 2 or a.shape[1] != b.shape[0]:
            raise ShapeError(f"matmul: incompatible shapes {a.shape} and {b.shape}")

    def forward(self, a, b):
        return a @ b

    def vjp(self, grad, values, out):
        a, b = values
        return grad @ b.T, a.T @ grad


@Primitive.register
class Concat(Primitive):
    """Join vectors end to end; scalars count as length-1 vectors."""

    def check(self, *values):
        if not values:
            raise ShapeError("concat: needs at least one input")
        for value in values:
            if value.ndim > 1:
                raise ShapeError(f"concat: expects scalars or vectors, got shapes {[v.shape for v in values]}")

    def forward(self, *values):
        return np.concatenate([np.atleast_1d(value) for value in values])

    def vjp(self, grad, values, out):
        pieces = []
        offset = 0
        for value in values:
            size = value.size
            pieces.append(grad[offset:offset + size].reshape(value.shape))
            offset += size
        return tuple(pieces)


@Primitive.register
class Stack(Primitive):
    def check(self, *values):
        if not values:
            raise ShapeError("stack: needs at least one input")
        shapes = {value.shape for value in values}
        if len(shapes) > 1:
            raise ShapeError(f"stack: inputs differ in shape {sorted(shapes)}")

    def forward(self, *values):
        return np.stack(values)

    def vjp(self, grad, values, out):
        return tuple(grad[i] for i in range(len(values)))


@Primitive.register
class Take(Primitive):
    """Select entries (or rows) along axis 0."""

    def check(self, a, indices=None):
        if a.ndim == 0:
            raise ShapeError("take: cannot index a scalar")
        index = np.asarray(indices)
        if index.size and (index.min() < -a.shape[0] or index.max() >= a.shape[0]):
            raise ShapeError(f"take: index {indices} outside axis of length {a.shape[0]}")

    def forward(self, a, indices=None):
        return np.take(a, indices, axis=0)

    def vjp(self, grad, values, out, indices=None):
        result = np.zeros_like(values[0])
        np.add.at(result, indices, grad)
        return (result,)


@Primitive.register
class Pick(Primitive):
    """Pick one column per row: out[i] = a[i, indices[i]]."""

    def check(self, a, indices=None):
        index = np.asarray(indices)
        if a.ndim != 2 or index.shape != (a.shape[0],):
            raise ShapeError(f"pick: expected a matrix and one index per row, got {a.shape} and {index.shape}")

    def forward(self, a, indices=None):
        return a[np.arange(a.shape[0]), indices]

    def vjp(self, grad, values, out, indices=None):
        result = np.zeros_like(values[0])
        result[np.arange(result.shape[0]), indices] += grad
        return (result,)
