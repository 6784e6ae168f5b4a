"""Log-normal and categorical decoders over the encoder state.

The density helpers accept either plain numbers or tape Vars; with Vars the
result is recorded on the tape and differentiable.
"""
import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np
from scipy.special import softmax

from ..autodiff import ParamStore, Tape, Var, ops
from ..core.errors import DomainError, ShapeError

LOG_2PI = math.log(2.0 * math.pi)
SIGMA2_FLOOR = 1e-6
# Zero distances are floored before entering the log-normal density.
DIST_FLOOR = 1e-6

Value = Union[float, np.ndarray, Var]


def _log(x):
    return ops.log(x) if isinstance(x, Var) else np.log(x)


def _exp(x):
    return ops.exp(x) if isinstance(x, Var) else np.exp(x)


def _sqrt(x):
    return ops.sqrt(x) if isinstance(x, Var) else np.sqrt(x)


def _square(x):
    return ops.square(x) if isinstance(x, Var) else np.square(x)


def _value(x) -> np.ndarray:
    return x.value if isinstance(x, Var) else np.asarray(x, dtype=np.float64)


@dataclass(frozen=True)
class LogNormalParams:
    """Location mu and variance sigma2 of log X ~ Normal(mu, sigma2)."""

    mu: Value
    sigma2: Value

    def __post_init__(self):
        sigma2 = _value(self.sigma2)
        if not np.all(np.isfinite(sigma2)) or np.any(sigma2 <= 0):
            raise DomainError(f"sigma2 must be positive and finite, got {sigma2}")

    @property
    def mu_value(self) -> float:
        return float(_value(self.mu))

    @property
    def sigma2_value(self) -> float:
        return float(_value(self.sigma2))

    @property
    def median(self) -> float:
        return math.exp(self.mu_value)

    @property
    def mean(self) -> float:
        return math.exp(self.mu_value + 0.5 * self.sigma2_value)

    def detach(self) -> 'LogNormalParams':
        return LogNormalParams(self.mu_value, self.sigma2_value)


def lognormal_logpdf(x: Value, p: LogNormalParams) -> Value:
    """log of the log-normal density at x > 0.

    Raises:
        DomainError: If x <= 0
    """
    if np.any(_value(x) <= 0):
        raise DomainError(f"lognormal_logpdf: x must be positive, got {_value(x)}")
    log_x = _log(x)
    return -log_x - 0.5 * LOG_2PI - 0.5 * _log(p.sigma2) - _square(log_x - p.mu) / (2.0 * p.sigma2)


def lognormal_sample(p: LogNormalParams, noise: float) -> Value:
    """Reparameterized draw exp(mu + sqrt(sigma2) * noise) for a standard-normal `noise`."""
    return _exp(p.mu + _sqrt(p.sigma2) * noise)


def lognormal_point(p: LogNormalParams) -> float:
    """Median exp(mu), the point estimate minimizing expected absolute error."""
    return p.median


def kl_lognormal(q: LogNormalParams, p: LogNormalParams) -> Value:
    """KL(q || p); equal to the KL between the underlying normals."""
    return (0.5 * _log(p.sigma2 / q.sigma2)
            + (q.sigma2 + _square(q.mu - p.mu)) / (2.0 * p.sigma2) - 0.5)


def log_softmax(logits: Value) -> Value:
    if isinstance(logits, Var):
        return ops.log_softmax(logits)
    logits = np.asarray(logits, dtype=np.float64)
    peak = logits.max()
    return logits - (peak + np.log(np.sum(np.exp(logits - peak))))


def mark_probs(logits: Value) -> np.ndarray:
    return softmax(_value(logits))


def mark_nll(logits: Value, mark: int) -> Value:
    """Negative log-probability of `mark`: logsumexp(logits) - logits[mark].

    Raises:
        ShapeError: If mark is outside the logit vector
    """
    size = _value(logits).shape[-1]
    if not 0 <= mark < size:
        raise ShapeError(f"mark_nll: mark {mark} outside {size} logits")
    if isinstance(logits, Var):
        return ops.logsumexp(logits) - logits[int(mark)]
    return -float(log_softmax(logits)[mark])


def kl_categorical(q_log_probs: Value, p_probs) -> Value:
    """KL(q || p) for categorical q given as log-probabilities and p as probabilities."""
    p_log = np.log(np.asarray(p_probs, dtype=np.float64))
    q_probs = _exp(q_log_probs)
    if isinstance(q_probs, Var):
        return ops.reduce_sum(q_probs * (q_log_probs - p_log))
    return float(np.sum(q_probs * (q_log_probs - p_log)))


def uniform_probs(num_marks: int) -> np.ndarray:
    return np.full(num_marks, 1.0 / num_marks)


def _inverse_softplus(y: float) -> float:
    return float(np.log(np.expm1(y)))


class LogNormalHead:
    """Affine map from a state to (mu, softplus(.) + 1e-6).

    A constant head keeps only the biases and ignores the state.
    """

    def __init__(self, store: ParamStore, prefix: str, hidden_size: int, constant: bool = False):
        self.store = store
        self.prefix = prefix
        self.hidden_size = hidden_size
        self.constant = constant

    @property
    def param_names(self):
        keys = ['b_mean', 'b_var'] if self.constant else ['w_mean', 'b_mean', 'w_var', 'b_var']
        return [self.prefix + key for key in keys]

    @classmethod
    def create(cls, store: ParamStore, prefix: str, hidden_size: int, rng: np.random.Generator,
               constant: bool = False, mu: float = 0.0, sigma2: float = 1.0) -> 'LogNormalHead':
        head = cls(store, prefix, hidden_size, constant)
        if not constant:
            bound = 1.0 / np.sqrt(hidden_size)
            store.add(prefix + 'w_mean', rng.uniform(-bound, bound, hidden_size))
            store.add(prefix + 'w_var', rng.uniform(-bound, bound, hidden_size))
        store.add(prefix + 'b_mean', np.array(mu))
        store.add(prefix + 'b_var', np.array(_inverse_softplus(sigma2 - SIGMA2_FLOOR)))
        return head

    def params(self, tape: Tape, state: Optional[Var] = None) -> LogNormalParams:
        mean = tape.param(self.prefix + 'b_mean')
        pre_var = tape.param(self.prefix + 'b_var')
        if not self.constant:
            if state is None:
                raise ShapeError(f"{self.prefix}: a state-dependent head needs a state")
            mean = ops.dot(tape.param(self.prefix + 'w_mean'), state) + mean
            pre_var = ops.dot(tape.param(self.prefix + 'w_var'), state) + pre_var
        return LogNormalParams(mean, ops.softplus(pre_var) + SIGMA2_FLOOR)


class MarkHead:
    """Affine map from a state to |C| mark logits."""

    def __init__(self, store: ParamStore, prefix: str, hidden_size: int, num_marks: int,
                 constant: bool = False):
        self.store = store
        self.prefix = prefix
        self.hidden_size = hidden_size
        self.num_marks = num_marks
        self.constant = constant

    @property
    def param_names(self):
        keys = ['bias'] if self.constant else ['weight', 'bias']
        return [self.prefix + key for key in keys]

    @classmethod
    def create(cls, store: ParamStore, prefix: str, hidden_size: int, num_marks: int,
               rng: np.random.Generator, constant: bool = False) -> 'MarkHead':
        if num_marks < 1:
            raise ValueError(f"num_marks must be >= 1, got {num_marks}")
        head = cls(store, prefix, hidden_size, num_marks, constant)
        head.reset(num_marks, rng, fresh=True)
        return head

    def reset(self, num_marks: int, rng: np.random.Generator, fresh: bool = False) -> 'MarkHead':
        """(Re)initialize the head for `num_marks` outputs."""
        put = self.store.add if fresh else self.store.replace
        if not self.constant:
            bound = 1.0 / np.sqrt(self.hidden_size)
            put(self.prefix + 'weight', rng.uniform(-bound, bound, (num_marks, self.hidden_size)))
        put(self.prefix + 'bias', np.zeros(num_marks))
        self.num_marks = num_marks
        return self

    def logits(self, tape: Tape, state: Optional[Var] = None) -> Var:
        bias = tape.param(self.prefix + 'bias')
        if self.constant:
            return bias + 0.0
        if state is None:
            raise ShapeError(f"{self.prefix}: a state-dependent head needs a state")
        return ops.matvec(tape.param(self.prefix + 'weight'), state) + bias
