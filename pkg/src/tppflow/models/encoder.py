import logging
from dataclasses import dataclass
from typing import List, Optional, Union

import numpy as np

from ..autodiff import ParamStore, Tape, Var, ops
from ..core.errors import DomainError, ShapeError
from ..core.events import Sequence, compute_deltas

logger = logging.getLogger(__name__)

Scalar = Union[float, Var]


@dataclass(frozen=True)
class EncoderConfig:
    """Sizes of the recurrent event encoder.

    Attributes:
        num_marks: Vocabulary size |C|
        embedding_size: Mark embedding width D_emb
        input_size: Projected event feature width D_in
        hidden_size: Recurrent state width D_h
        conditioned: Append the featurized next observed event to every input
            (used by the posterior encoder), doubling the cell input width
    """

    num_marks: int
    embedding_size: int = 16
    input_size: int = 16
    hidden_size: int = 32
    conditioned: bool = False

    def __post_init__(self):
        for name in ('num_marks', 'embedding_size', 'input_size', 'hidden_size'):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1, got {getattr(self, name)}")

    @property
    def cell_input_size(self) -> int:
        return self.input_size * (2 if self.conditioned else 1)


def _uniform(rng: np.random.Generator, fan_in: int, shape) -> np.ndarray:
    bound = 1.0 / np.sqrt(fan_in)
    return rng.uniform(-bound, bound, size=shape)


class Encoder:
    """Gated recurrent encoder mapping an event stream to hidden states s_1..s_K.

    Event features use only the mark embedding, log Δt and log(Δd + 1), so the
    states do not depend on absolute time or position.
    """

    GATES = ('z', 'r', 'c')

    def __init__(self, config: EncoderConfig, store: ParamStore, prefix: str = 'encoder.'):
        self.config = config
        self.store = store
        self.prefix = prefix

    def _name(self, key: str) -> str:
        return self.prefix + key

    @property
    def param_names(self) -> List[str]:
        keys = ['embedding', 'proj_w', 'proj_b']
        for gate in self.GATES:
            keys += [f'w_{gate}', f'u_{gate}', f'b_{gate}']
        keys.append('s0')
        return [self._name(key) for key in keys]

    @classmethod
    def create(cls, config: EncoderConfig, store: ParamStore, rng: np.random.Generator,
               prefix: str = 'encoder.') -> 'Encoder':
        """Add freshly initialized parameters to `store` and return the encoder."""
        encoder = cls(config, store, prefix)
        d_emb, d_in, d_h = config.embedding_size, config.input_size, config.hidden_size
        feature_width = d_emb + 2
        cell_in = config.cell_input_size
        store.add(encoder._name('embedding'), _uniform(rng, d_emb, (config.num_marks, d_emb)))
        store.add(encoder._name('proj_w'), _uniform(rng, feature_width, (d_in, feature_width)))
        store.add(encoder._name('proj_b'), np.zeros(d_in))
        for gate in cls.GATES:
            store.add(encoder._name(f'w_{gate}'), _uniform(rng, cell_in, (d_h, cell_in)))
            store.add(encoder._name(f'u_{gate}'), _uniform(rng, d_h, (d_h, d_h)))
            store.add(encoder._name(f'b_{gate}'), np.zeros(d_h))
        store.add(encoder._name('s0'), np.zeros(d_h))
        return encoder

    def reset_embedding(self, num_marks: int, rng: np.random.Generator) -> 'Encoder':
        """Re-initialize the mark embedding for a new vocabulary size."""
        d_emb = self.config.embedding_size
        self.store.replace(self._name('embedding'), _uniform(rng, d_emb, (num_marks, d_emb)))
        config = EncoderConfig(num_marks, d_emb, self.config.input_size,
                               self.config.hidden_size, self.config.conditioned)
        return Encoder(config, self.store, self.prefix)

    @staticmethod
    def delta_features(dt: Optional[float], dd: Optional[float] = None) -> np.ndarray:
        """The two scalar inputs (log Δt, log(Δd + 1)) before projection.

        `dt=None` marks the first event of a stream, which has no predecessor
        and gets the neutral value 0.
        """
        if dt is not None and not dt > 0:
            raise DomainError(f"featurize: dt must be positive, got {dt}")
        if dd is not None and dd < 0:
            raise DomainError(f"featurize: dd must be non-negative, got {dd}")
        return np.array([0.0 if dt is None else np.log(dt), 0.0 if dd is None else np.log1p(dd)])

    def featurize(self, tape: Tape, mark: int, dt: Optional[Scalar] = None,
                  dd: Optional[Scalar] = None) -> Var:
        """Project (mark embedding, log dt, log(dd + 1)) to the D_in input vector."""
        if not 0 <= mark < self.config.num_marks:
            raise ShapeError(f"featurize: mark {mark} outside vocabulary of {self.config.num_marks}")
        embedding = ops.take(tape.param(self._name('embedding')), int(mark))
        if isinstance(dt, Var):
            if not float(dt.value) > 0:
                raise DomainError(f"featurize: dt must be positive, got {float(dt.value)}")
            log_dt = ops.log(dt)
        else:
            log_dt = self.delta_features(dt)[0]
        if isinstance(dd, Var):
            log_dd = ops.log(dd + 1.0)
        else:
            log_dd = self.delta_features(None, dd)[1]
        features = ops.concat(embedding, log_dt, log_dd)
        return ops.affine(tape.param(self._name('proj_w')), features, tape.param(self._name('proj_b')))

    def initial_state(self, tape: Tape) -> Var:
        return tape.param(self._name('s0'))

    def step(self, tape: Tape, state: Var, x: Var) -> Var:
        """One gated update: s' = z * s + (1 - z) * tanh(W_c x + U_c (r * s) + b_c)."""
        d_h = self.config.hidden_size
        if state.shape != (d_h,):
            raise ShapeError(f"step: state shape {state.shape} does not match hidden size {d_h}")
        if x.shape != (self.config.cell_input_size,):
            raise ShapeError(f"step: input shape {x.shape} does not match {self.config.cell_input_size}")

        def gate(name, h):
            return (ops.matvec(tape.param(self._name(f'w_{name}')), x)
                    + ops.matvec(tape.param(self._name(f'u_{name}')), h)
                    + tape.param(self._name(f'b_{name}')))

        update = ops.sigmoid(gate('z', state))
        reset = ops.sigmoid(gate('r', state))
        candidate = ops.tanh(gate('c', reset * state))
        return update * state + (1.0 - update) * candidate

    def encode_sequence(self, tape: Tape, seq: Sequence) -> List[Var]:
        """Return the states s_1..s_K, where s_k has consumed events 1..k.

        Raises:
            ValueError: If the sequence is empty
        """
        if self.config.conditioned:
            raise ValueError("a conditioned encoder needs next-event inputs; drive it step by step")
        if len(seq) == 0:
            raise ValueError(f"cannot encode empty sequence {seq.id!r}")
        deltas = compute_deltas(seq)
        state = self.initial_state(tape)
        states = []
        for k, event in enumerate(seq):
            dt = None if k == 0 else float(deltas.dt[k])
            dd = None if deltas.dd is None else float(deltas.dd[k])
            state = self.step(tape, state, self.featurize(tape, event.mark, dt, dd))
            states.append(state)
        return states

    def encode_values(self, seq: Sequence) -> np.ndarray:
        """Encode without keeping the tape; returns a (K, D_h) array."""
        tape = Tape(self.store)
        return np.stack([state.value for state in self.encode_sequence(tape, seq)])
