import logging
import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import numpy as np

from ..autodiff import ParamStore, Tape, Var, load_checkpoint, save_checkpoint
from ..core.errors import CheckpointError, ConfigError
from ..core.events import Dataset, Event, Sequence, compute_deltas
from ..core.noise import NoiseStream
from .encoder import Encoder, EncoderConfig
from .heads import (
    DIST_FLOOR,
    LogNormalHead,
    MarkHead,
    lognormal_logpdf,
    lognormal_sample,
    mark_nll,
    mark_probs,
)
from .training import LossTrace, LossWeights, TrainConfig, fit_store

logger = logging.getLogger(__name__)

COMPONENTS = ('encoder', 'time_head', 'dist_head', 'mark_head')


@dataclass(frozen=True)
class ModelConfig:
    """Architecture of the base MTPP.

    Attributes:
        constant_heads: Decoders ignore the history state (only biases are
            trained), giving a renewal process with i.i.d. log-normal gaps
    """

    embedding_size: int = 16
    input_size: int = 16
    hidden_size: int = 32
    constant_heads: bool = False

    def __post_init__(self):
        for name in ('embedding_size', 'input_size', 'hidden_size'):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be >= 1, got {getattr(self, name)}", key=f'model.{name}')

    def encoder_config(self, num_marks: int, conditioned: bool = False) -> EncoderConfig:
        return EncoderConfig(num_marks, self.embedding_size, self.input_size, self.hidden_size, conditioned)


@dataclass(frozen=True)
class NextEventPrediction:
    """Point predictions for the event following a prefix."""

    mark_probs: np.ndarray
    mark: int
    dt: float
    dd: Optional[float] = None


class MtppModel:
    """Neural marked temporal point process with log-normal time and distance decoders.

    The distance head exists iff the model was built for a dataset with
    locations. All parameters live in `store` under `prefix`, so several
    models can share one store.
    """

    def __init__(self, vocab, has_locations: bool, config: ModelConfig, store: ParamStore,
                 prefix: str = '', weights: LossWeights = LossWeights(), use_distance: bool = True):
        self.vocab = tuple(vocab)
        self.has_locations = has_locations
        self.config = config
        self.store = store
        self.prefix = prefix
        self.weights = weights
        self.use_distance = use_distance
        hidden = config.hidden_size
        self.encoder = Encoder(config.encoder_config(len(self.vocab)), store, prefix + 'encoder.')
        self.time_head = LogNormalHead(store, prefix + 'time_head.', hidden, config.constant_heads)
        self.dist_head = (LogNormalHead(store, prefix + 'dist_head.', hidden, config.constant_heads)
                          if has_locations else None)
        self.mark_head = MarkHead(store, prefix + 'mark_head.', hidden, len(self.vocab), config.constant_heads)

    @classmethod
    def create(cls, vocab, has_locations: bool = False, config: ModelConfig = ModelConfig(),
               seed: int = 0, store: Optional[ParamStore] = None, prefix: str = '',
               weights: LossWeights = LossWeights()) -> 'MtppModel':
        """Build a model with freshly initialized parameters, deterministic given `seed`."""
        vocab = tuple(vocab)
        if not vocab:
            raise ValueError("cannot build a model over an empty vocabulary")
        store = ParamStore() if store is None else store
        rng = np.random.default_rng(seed)
        hidden = config.hidden_size
        Encoder.create(config.encoder_config(len(vocab)), store, rng, prefix + 'encoder.')
        LogNormalHead.create(store, prefix + 'time_head.', hidden, rng, config.constant_heads)
        if has_locations:
            LogNormalHead.create(store, prefix + 'dist_head.', hidden, rng, config.constant_heads)
        MarkHead.create(store, prefix + 'mark_head.', hidden, len(vocab), rng, config.constant_heads)
        return cls(vocab, has_locations, config, store, prefix, weights)

    @classmethod
    def for_dataset(cls, ds: Dataset, config: ModelConfig = ModelConfig(), seed: int = 0,
                    weights: LossWeights = LossWeights()) -> 'MtppModel':
        return cls.create(ds.vocab, ds.has_locations, config, seed, weights=weights)

    @property
    def num_marks(self) -> int:
        return len(self.vocab)

    @property
    def models_distance(self) -> bool:
        return self.dist_head is not None and self.use_distance

    def _view(self, store=None, **changes) -> 'MtppModel':
        fields = dict(vocab=self.vocab, has_locations=self.has_locations, config=self.config,
                      store=self.store if store is None else store, prefix=self.prefix,
                      weights=self.weights, use_distance=self.use_distance)
        fields.update(changes)
        return MtppModel(**fields)

    def copy(self) -> 'MtppModel':
        return self._view(store=self.store.copy())

    def with_weights(self, weights: LossWeights) -> 'MtppModel':
        return self._view(weights=weights)

    def temporal_only(self, enabled: bool = True) -> 'MtppModel':
        """View sharing parameters with the distance head and its loss term switched off or back on."""
        return self._view(use_distance=not enabled)

    def component_params(self, component: str) -> List[str]:
        """Parameter names of one component; the mark embedding belongs to the mark head."""
        embedding = self.prefix + 'encoder.embedding'
        if component == 'encoder':
            return [name for name in self.encoder.param_names if name != embedding]
        if component == 'time_head':
            return self.time_head.param_names
        if component == 'dist_head':
            return self.dist_head.param_names if self.dist_head is not None else []
        if component == 'mark_head':
            return self.mark_head.param_names + [embedding]
        raise ValueError(f"unknown component {component!r}; expected one of {COMPONENTS}")

    @property
    def param_names(self) -> List[str]:
        return [name for component in COMPONENTS for name in self.component_params(component)]

    def retarget(self, vocab, seed: int = 0) -> 'MtppModel':
        """Copy with the mark embedding and mark head re-initialized for a new vocabulary."""
        vocab = tuple(vocab)
        model = self.copy()
        rng = np.random.default_rng(seed)
        model.encoder.reset_embedding(len(vocab), rng)
        model.mark_head.reset(len(vocab), rng)
        return model._view(vocab=vocab)

    def states(self, tape: Tape, seq: Sequence) -> List[Optional[Var]]:
        """History states s_1..s_K; constant heads need none."""
        if self.config.constant_heads:
            return [None] * len(seq)
        return self.encoder.encode_sequence(tape, seq)

    def event_terms(self, tape: Tape, state: Optional[Var], mark: int, dt,
                    dd: Optional[float] = None) -> Dict[str, Optional[Var]]:
        """Unweighted negative log-likelihood terms of one target event given state s_k.

        `dt` may be a Var when the gap itself is a sampled quantity.
        """
        terms = {
            'mark': mark_nll(self.mark_head.logits(tape, state), mark),
            'time': -lognormal_logpdf(dt, self.time_head.params(tape, state)),
            'dist': None,
        }
        if self.models_distance and dd is not None:
            terms['dist'] = -lognormal_logpdf(max(dd, DIST_FLOOR), self.dist_head.params(tape, state))
        return terms

    def weighted(self, terms: Dict[str, Optional[Var]], weights: Optional[LossWeights] = None) -> Var:
        weights = weights or self.weights
        total = weights.mark * terms['mark'] + weights.time * terms['time']
        if terms['dist'] is not None and self.use_distance:
            total = total + weights.dist * terms['dist']
        return total

    def metadata(self) -> dict:
        return {
            'kind': 'mtpp',
            'vocab': list(self.vocab),
            'has_locations': self.has_locations,
            'prefix': self.prefix,
            'use_distance': self.use_distance,
            'model': {
                'embedding_size': self.config.embedding_size,
                'input_size': self.config.input_size,
                'hidden_size': self.config.hidden_size,
                'constant_heads': self.config.constant_heads,
            },
            'weights': {'mark': self.weights.mark, 'time': self.weights.time, 'dist': self.weights.dist},
        }

    @classmethod
    def from_metadata(cls, metadata: dict, store: ParamStore) -> 'MtppModel':
        return cls(metadata['vocab'], metadata['has_locations'], ModelConfig(**metadata['model']), store,
                   metadata.get('prefix', ''), LossWeights(**metadata['weights']),
                   metadata.get('use_distance', True))

    def save(self, file) -> None:
        save_checkpoint(self.store, file, self.metadata())

    @classmethod
    def load(cls, file) -> 'MtppModel':
        """Load a model written by `save`.

        Raises:
            CheckpointError: If the file is not an MTPP checkpoint
        """
        store, metadata = load_checkpoint(file)
        if metadata.get('kind') != 'mtpp':
            raise CheckpointError(f"expected an mtpp checkpoint, found {metadata.get('kind')!r}")
        model = cls.from_metadata(metadata, store)
        missing = [name for name in model.param_names if name not in store]
        if missing:
            raise CheckpointError(f"checkpoint lacks parameters {missing}")
        return model


def _require_targets(seq: Sequence) -> None:
    if len(seq) < 2:
        raise ValueError(f"sequence {seq.id!r} has {len(seq)} event(s); at least 2 are needed")


def sequence_terms(model: MtppModel, tape: Tape, seq: Sequence) -> List[Dict[str, Optional[Var]]]:
    """Per-event NLL terms for targets e_2..e_K, each conditioned on the preceding state."""
    _require_targets(seq)
    deltas = compute_deltas(seq)
    states = model.states(tape, seq)
    terms = []
    for k in range(1, len(seq)):
        dd = None if deltas.dd is None else float(deltas.dd[k])
        terms.append(model.event_terms(tape, states[k - 1], seq[k].mark, float(deltas.dt[k]), dd))
    return terms


def sequence_nll_graph(model: MtppModel, tape: Tape, seq: Sequence,
                       weights: Optional[LossWeights] = None, mask=None) -> Var:
    """Weighted NLL summed over target events; `mask[j] = False` drops target j."""
    terms = sequence_terms(model, tape, seq)
    total = None
    for j, event_terms in enumerate(terms):
        if mask is not None and not mask[j]:
            continue
        term = model.weighted(event_terms, weights)
        total = term if total is None else total + term
    return total if total is not None else tape.constant(0.0)


def sequence_nll(model: MtppModel, seq: Sequence, weights: Optional[LossWeights] = None,
                 mask=None) -> float:
    """Negative log-likelihood of events 2..K under the model.

    Raises:
        ValueError: If the sequence has fewer than two events
    """
    return float(sequence_nll_graph(model, Tape(model.store), seq, weights, mask).value)


def event_nll(model: MtppModel, seq: Sequence, index: int, weights: Optional[LossWeights] = None) -> float:
    """Weighted NLL term of event `index` (1-based position 2..K is index 1..K-1)."""
    if not 1 <= index < len(seq):
        raise IndexError(f"event index {index} has no preceding history in a sequence of {len(seq)}")
    tape = Tape(model.store)
    return float(model.weighted(sequence_terms(model, tape, seq)[index - 1], weights).value)


def nll_components(model: MtppModel, seq: Sequence) -> Dict[str, Optional[float]]:
    """Unweighted mark, time and distance NLL summed over the sequence's targets."""
    terms = sequence_terms(model, Tape(model.store), seq)
    result = {
        'mark': float(sum(t['mark'].value for t in terms)),
        'time': float(sum(t['time'].value for t in terms)),
        'dist': None,
        'events': len(terms),
    }
    if terms and terms[0]['dist'] is not None:
        result['dist'] = float(sum(t['dist'].value for t in terms))
    return result


def mean_nll_components(model: MtppModel, ds: Dataset) -> Dict[str, Optional[float]]:
    """Per-event mean of each NLL component over every sequence with at least two events."""
    totals = {'mark': 0.0, 'time': 0.0, 'dist': None, 'events': 0}
    for seq in sorted(ds, key=lambda s: s.id):
        if len(seq) < 2:
            continue
        parts = nll_components(model, seq)
        totals['mark'] += parts['mark']
        totals['time'] += parts['time']
        if parts['dist'] is not None:
            totals['dist'] = (totals['dist'] or 0.0) + parts['dist']
        totals['events'] += parts['events']
    count = totals['events']
    if count == 0:
        return {'mark': None, 'time': None, 'dist': None, 'events': 0}
    return {
        'mark': totals['mark'] / count,
        'time': totals['time'] / count,
        'dist': None if totals['dist'] is None else totals['dist'] / count,
        'events': count,
    }


def mean_sequence_loss(model: MtppModel, ds: Dataset) -> float:
    """Average over sequences of the per-event weighted NLL, the quantity training minimizes."""
    losses = [sequence_nll(model, seq) / (len(seq) - 1) for seq in sorted(ds, key=lambda s: s.id)
              if len(seq) >= 2]
    return float(np.mean(losses)) if losses else math.nan


def train(model: MtppModel, dataset: Dataset, config: TrainConfig,
          validation: Optional[Dataset] = None) -> Tuple[MtppModel, LossTrace]:
    """Fit a copy of `model` by minibatch Adam on the per-sequence mean NLL.

    Returns:
        The trained copy and its per-epoch loss trace

    Raises:
        ValueError: If the dataset has no sequence with two or more events
        NonFiniteError: If a loss becomes non-finite, naming the sequence
    """
    if len(dataset) == 0:
        raise ValueError("cannot train on an empty dataset")
    trained = model.copy().with_weights(config.weights)
    sequences = [seq for seq in dataset if len(seq) >= 2]
    if config.epochs and not sequences:
        raise ValueError("no sequence in the dataset has two or more events")

    def objective(tape, seq, noise):
        return sequence_nll_graph(trained, tape, seq) / (len(seq) - 1)

    validate = None
    if validation is not None and any(len(seq) >= 2 for seq in validation):
        def validate():
            return mean_sequence_loss(trained, validation), mean_nll_components(trained, validation)

    trace = fit_store(trained.store, sequences, objective, config, validate, label='mtpp')
    return trained, trace


def _head_values(model: MtppModel, tape: Tape, state: Optional[Var]):
    probs = mark_probs(model.mark_head.logits(tape, state))
    time_params = model.time_head.params(tape, state).detach()
    dist_params = model.dist_head.params(tape, state).detach() if model.models_distance else None
    return probs, time_params, dist_params


def predict_next(model: MtppModel, prefix: Sequence) -> NextEventPrediction:
    """Mark distribution with its argmax, and median dt (and dd) for the next event.

    Raises:
        ValueError: If the prefix is empty
    """
    if len(prefix) == 0:
        raise ValueError("predict_next needs a non-empty prefix")
    tape = Tape(model.store)
    state = model.states(tape, prefix)[-1]
    probs, time_params, dist_params = _head_values(model, tape, state)
    return NextEventPrediction(
        mark_probs=probs,
        mark=int(np.argmax(probs)),
        dt=time_params.median,
        dd=dist_params.median if dist_params is not None else None,
    )


def prefix_predictions(model: MtppModel, seq: Sequence) -> List[NextEventPrediction]:
    """predict_next for every prefix seq[:1] .. seq[:K-1], sharing one encoder pass."""
    tape = Tape(model.store)
    states = model.states(tape, seq)
    predictions = []
    for state in states[:-1]:
        probs, time_params, dist_params = _head_values(model, tape, state)
        predictions.append(NextEventPrediction(
            probs, int(np.argmax(probs)), time_params.median,
            dist_params.median if dist_params is not None else None))
    return predictions


def _bearing(seq: Sequence) -> float:
    if not seq.has_locations or len(seq) < 2:
        return 0.0
    (x0, y0), (x1, y1) = seq[-2].location, seq[-1].location
    if x0 == x1 and y0 == y1:
        return 0.0
    return math.atan2(y1 - y0, x1 - x0)


def forecast(model: MtppModel, prefix: Sequence, horizon: int, seed: int = 0,
             deterministic: bool = False, noise: Optional[NoiseStream] = None) -> List[Event]:
    """Roll the model forward `horizon` events by ancestral sampling.

    Each step draws the gap, then the mark, then (with a distance head) the
    step length, which is laid along the bearing of the prefix's last
    displacement. `deterministic=True` uses zero noise and argmax marks, i.e.
    median gaps.

    Raises:
        ValueError: If horizon < 1 or the prefix is empty
    """
    if horizon < 1:
        raise ValueError(f"horizon must be >= 1, got {horizon}")
    if len(prefix) == 0:
        raise ValueError("forecast needs a non-empty prefix")
    if noise is None:
        noise = NoiseStream.deterministic() if deterministic else NoiseStream(seed)
    tape = Tape(model.store)
    state = model.states(tape, prefix)[-1]
    last_time = prefix[-1].time
    location = prefix[-1].location
    heading = _bearing(prefix)
    events = []
    for _ in range(horizon):
        probs, time_params, dist_params = _head_values(model, tape, state)
        dt = float(lognormal_sample(time_params, noise.normal()))
        mark = noise.choice(probs)
        time = last_time + dt
        if not time > last_time:
            time = float(np.nextafter(last_time, np.inf))
        dd = None
        if location is not None:
            if dist_params is not None:
                dd = float(lognormal_sample(dist_params, noise.normal()))
                location = (location[0] + dd * math.cos(heading), location[1] + dd * math.sin(heading))
            else:
                dd = 0.0
        events.append(Event(mark=mark, time=time, location=location))
        if not model.config.constant_heads:
            x = model.encoder.featurize(tape, mark, time - last_time, dd)
            state = model.encoder.step(tape, state, x)
        last_time = time
    return events


def global_mean_gap(ds: Dataset) -> float:
    """Mean inter-event gap over all sequences, the naive forecaster's step."""
    gaps = np.concatenate([np.diff(seq.times) for seq in ds if len(seq) >= 2] or [np.array([])])
    if gaps.size == 0:
        raise ValueError("dataset has no inter-event gaps")
    return float(gaps.mean())
