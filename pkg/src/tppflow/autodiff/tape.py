import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from ..core.errors import NonFiniteError, ShapeError
from .primitives import Primitive

logger = logging.getLogger(__name__)


@dataclass
class Node:
    """One recorded operation: a primitive name, its input node indices and its value."""

    op: str
    inputs: Tuple[int, ...]
    value: np.ndarray
    attrs: Dict[str, Any] = field(default_factory=dict)
    param: Optional[str] = None


class Var:
    """Handle to a node on a tape, with arithmetic operators that record primitives."""

    __slots__ = ('tape', 'index')
    # Keep numpy from broadcasting over a Var on the left of an operator.
    __array_ufunc__ = None

    def __init__(self, tape: 'Tape', index: int):
        self.tape = tape
        self.index = index

    @property
    def value(self) -> np.ndarray:
        return self.tape.nodes[self.index].value

    @property
    def shape(self) -> Tuple[int, ...]:
        return self.value.shape

    @property
    def ndim(self) -> int:
        return self.value.ndim

    def item(self) -> float:
        return float(self.value)

    def __repr__(self) -> str:
        return f"Var(#{self.index}, shape={self.shape})"

    def __add__(self, other):
        return self.tape.apply('add', self, other)

    def __radd__(self, other):
        return self.tape.apply('add', other, self)

    def __sub__(self, other):
        return self.tape.apply('sub', self, other)

    def __rsub__(self, other):
        return self.tape.apply('sub', other, self)

    def __mul__(self, other):
        return self.tape.apply('mul', self, other)

    def __rmul__(self, other):
        return self.tape.apply('mul', other, self)

    def __truediv__(self, other):
        return self.tape.apply('div', self, other)

    def __rtruediv__(self, other):
        return self.tape.apply('div', other, self)

    def __neg__(self):
        return self.tape.apply('neg', self)

    def __matmul__(self, other):
        return self.tape.matmul(self, other)

    def __rmatmul__(self, other):
        return self.tape.matmul(other, self)

    def __getitem__(self, index):
        return self.tape.apply('take', self, indices=index)

    def sum(self, axis=None):
        return self.tape.apply('sum', self, axis=axis)


class Tape:
    """Append-only record of primitive applications.

    Parameters are read from an optional ParamStore; `backward` accumulates
    gradients into that store. Inputs always precede outputs, so the tape is
    acyclic by construction.
    """

    def __init__(self, store=None):
        self.store = store
        self.nodes: List[Node] = []
        self._params: Dict[str, int] = {}

    def __len__(self) -> int:
        return len(self.nodes)

    def _push(self, node: Node) -> Var:
        self.nodes.append(node)
        return Var(self, len(self.nodes) - 1)

    def constant(self, value) -> Var:
        return self._push(Node('constant', (), np.array(value, dtype=np.float64)))

    def param(self, name: str) -> Var:
        """Return the Var bound to a stored parameter; repeated lookups share one node."""
        if self.store is None:
            raise KeyError(f"tape has no parameter store to read {name!r} from")
        if name not in self._params:
            value = np.array(self.store[name], dtype=np.float64)
            self._params[name] = self._push(Node('param', (), value, param=name)).index
        return Var(self, self._params[name])

    def lift(self, value) -> Var:
        if isinstance(value, Var):
            if value.tape is not self:
                raise ValueError("cannot mix Vars recorded on different tapes")
            return value
        return self.constant(value)

    def apply(self, name: str, *inputs, **attrs) -> Var:
        primitive = Primitive.get(name)
        handles = [self.lift(value) for value in inputs]
        values = [self.nodes[handle.index].value for handle in handles]
        primitive.check(*values, **attrs)
        out = np.asarray(primitive.forward(*values, **attrs), dtype=np.float64)
        if not np.all(np.isfinite(out)):
            raise NonFiniteError(f"{name} produced a non-finite value")
        return self._push(Node(name, tuple(handle.index for handle in handles), out, attrs))

    def matmul(self, a, b) -> Var:
        a, b = self.lift(a), self.lift(b)
        dims = (a.ndim, b.ndim)
        if dims == (2, 1):
            return self.apply('matvec', a, b)
        if dims == (2, 2):
            return self.apply('matmul', a, b)
        if dims == (1, 1):
            return self.apply('dot', a, b)
        raise ShapeError(f"matmul: unsupported shapes {a.shape} and {b.shape}")

    def backward(self, root: Var) -> Dict[str, np.ndarray]:
        return backward(self, root)


def backward(tape: Tape, root: Var) -> Dict[str, np.ndarray]:
    """Propagate d(root)/d(node) through the tape in reverse insertion order.

    Gradients for parameter nodes are accumulated into the tape's store, so
    repeated calls without `zero_grad` add up.

    Returns:
        The gradient contributed by this call for every parameter on the tape

    Raises:
        ShapeError: If root is not a scalar
    """
    if root.tape is not tape:
        raise ValueError("root belongs to a different tape")
    if root.value.shape != ():
        raise ShapeError(f"backward: root must be a scalar, got shape {root.value.shape}")

    adjoints: List[Optional[np.ndarray]] = [None] * (root.index + 1)
    adjoints[root.index] = np.ones((), dtype=np.float64)
    contributed: Dict[str, np.ndarray] = {}
    for index in range(root.index, -1, -1):
        grad = adjoints[index]
        if grad is None:
            continue
        node = tape.nodes[index]
        if node.param is not None:
            contributed[node.param] = grad
            if tape.store is not None:
                tape.store.accumulate(node.param, grad)
            continue
        if not node.inputs:
            continue
        values = [tape.nodes[i].value for i in node.inputs]
        input_grads = Primitive.get(node.op).vjp(grad, values, node.value, **node.attrs)
        for input_index, input_grad in zip(node.inputs, input_grads):
            if adjoints[input_index] is None:
                adjoints[input_index] = np.array(input_grad, dtype=np.float64)
            else:
                adjoints[input_index] = adjoints[input_index] + input_grad
    logger.debug("backward visited %d nodes, %d parameters", root.index + 1, len(contributed))
    return contributed
