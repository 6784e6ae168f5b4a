import logging
import math
from dataclasses import dataclass, field
from typing import List, Optional, Tuple, Union

import numpy as np

from ..autodiff import ParamStore, Tape, Var, load_checkpoint, ops, save_checkpoint
from ..core.errors import CheckpointError, ConfigError, NonFiniteError
from ..core.events import Dataset, DeltaView, Event, Sequence, compute_deltas
from ..core.noise import NoiseStream, sequence_seed
from .encoder import Encoder
from .heads import (
    LogNormalHead,
    LogNormalParams,
    MarkHead,
    kl_categorical,
    kl_lognormal,
    log_softmax,
    lognormal_sample,
    mark_probs,
    uniform_probs,
)
from .mtpp import ModelConfig, MtppModel, forecast, mean_nll_components
from .training import LossTrace, LossWeights, TrainConfig, fit_store

logger = logging.getLogger(__name__)

OBSERVED_PREFIX = 'observed.'
POSTERIOR_PREFIX = 'posterior.'
# Paths of the gap walk less likely than this are not expanded further.
BRANCH_FLOOR = 1e-8


@dataclass(frozen=True)
class ImtppConfig:
    """Settings of the missing-event model.

    Attributes:
        max_missing: Cap on sampled missing events per observed gap
        samples_per_gap: Posterior trajectories drawn per gap when imputing
        prior_sigma2: Variance of the fixed log-normal prior over missing gaps
    """

    max_missing: int = 8
    samples_per_gap: int = 5
    prior_sigma2: float = 1.0

    def __post_init__(self):
        if self.max_missing < 0:
            raise ConfigError(f"max_missing must be >= 0, got {self.max_missing}", key='imtpp.max_missing')
        if self.samples_per_gap < 1:
            raise ConfigError(f"samples_per_gap must be >= 1, got {self.samples_per_gap}",
                              key='imtpp.samples_per_gap')
        if not self.prior_sigma2 > 0:
            raise ConfigError(f"prior_sigma2 must be positive, got {self.prior_sigma2}",
                              key='imtpp.prior_sigma2')


@dataclass(frozen=True)
class MissingEvent:
    """A latent event placed strictly inside an observed inter-event interval."""

    mark: int
    time: float

    def to_event(self, location=None) -> Event:
        return Event(mark=self.mark, time=self.time, location=location, imputed=True)


@dataclass
class GapSample:
    """Posterior draws for one observed gap.

    Attributes:
        events: Accepted missing events in time order
        gaps: Their inter-arrival times as tape Vars (reparameterized)
        kl: Per-event KL(q || prior), time and mark parts summed
        q_state: Posterior state after consuming the accepted events
        last_time: Time of the last accepted event, or the gap start
    """

    events: List[MissingEvent] = field(default_factory=list)
    gaps: List[Var] = field(default_factory=list)
    kl: List[Var] = field(default_factory=list)
    q_state: Optional[Var] = None
    last_time: Union[float, Var] = 0.0

    def __len__(self) -> int:
        return len(self.events)


class ImtppModel:
    """Observed-event MTPP p coupled with a posterior process q over missing events.

    p and q keep separate encoders in one parameter store. q's input for each
    event also carries the next observed event's mark and the time left until
    it, and q's decoders read that same featurized target next to q's state,
    so q proposes missing events knowing where the gap ends. The prior over
    missing events is fixed: LogNormal(mu_r, sigma2_r) gaps, uniform marks.
    """

    def __init__(self, observed: MtppModel, posterior_encoder: Encoder, posterior_time: LogNormalHead,
                 posterior_mark: MarkHead, prior: LogNormalParams, config: ImtppConfig = ImtppConfig()):
        self.observed = observed
        self.posterior_encoder = posterior_encoder
        self.posterior_time = posterior_time
        self.posterior_mark = posterior_mark
        self.prior = prior.detach()
        self.config = config

    @property
    def store(self) -> ParamStore:
        return self.observed.store

    @property
    def vocab(self):
        return self.observed.vocab

    @property
    def has_locations(self) -> bool:
        return self.observed.has_locations

    @property
    def prior_mark_probs(self) -> np.ndarray:
        return uniform_probs(self.observed.num_marks)

    @staticmethod
    def _components(vocab, has_locations, model_config: ModelConfig, store: ParamStore,
                    weights: LossWeights):
        observed = MtppModel(vocab, has_locations, model_config, store, OBSERVED_PREFIX, weights)
        width = _context_size(model_config)
        encoder = Encoder(model_config.encoder_config(len(observed.vocab), conditioned=True), store,
                          POSTERIOR_PREFIX + 'encoder.')
        time_head = LogNormalHead(store, POSTERIOR_PREFIX + 'time_head.', width, model_config.constant_heads)
        mark_head = MarkHead(store, POSTERIOR_PREFIX + 'mark_head.', width, len(observed.vocab),
                             model_config.constant_heads)
        return observed, encoder, time_head, mark_head

    @classmethod
    def create(cls, vocab, has_locations: bool, prior: LogNormalParams,
               model_config: ModelConfig = ModelConfig(), seed: int = 0,
               config: ImtppConfig = ImtppConfig(), weights: LossWeights = LossWeights()) -> 'ImtppModel':
        store = ParamStore()
        MtppModel.create(vocab, has_locations, model_config, seed, store, OBSERVED_PREFIX, weights)
        rng = np.random.default_rng([seed, 1])
        width = _context_size(model_config)
        Encoder.create(model_config.encoder_config(len(vocab), conditioned=True), store, rng,
                       POSTERIOR_PREFIX + 'encoder.')
        # Start q at the prior so early KL terms stay small.
        LogNormalHead.create(store, POSTERIOR_PREFIX + 'time_head.', width, rng,
                             model_config.constant_heads, mu=prior.mu_value, sigma2=prior.sigma2_value)
        MarkHead.create(store, POSTERIOR_PREFIX + 'mark_head.', width, len(vocab), rng,
                        model_config.constant_heads)
        return cls(*cls._components(vocab, has_locations, model_config, store, weights), prior, config)

    @classmethod
    def for_dataset(cls, ds: Dataset, model_config: ModelConfig = ModelConfig(), seed: int = 0,
                    config: ImtppConfig = ImtppConfig(), weights: LossWeights = LossWeights()) -> 'ImtppModel':
        prior = prior_from_dataset(ds, config.prior_sigma2)
        return cls.create(ds.vocab, ds.has_locations, prior, model_config, seed, config, weights)

    def _rebuild(self, store: ParamStore, weights: Optional[LossWeights] = None) -> 'ImtppModel':
        parts = self._components(self.vocab, self.has_locations, self.observed.config, store,
                                 weights or self.observed.weights)
        return ImtppModel(*parts, self.prior, self.config)

    def copy(self) -> 'ImtppModel':
        return self._rebuild(self.store.copy())

    def with_weights(self, weights: LossWeights) -> 'ImtppModel':
        return self._rebuild(self.store, weights)

    @property
    def posterior_param_names(self) -> List[str]:
        return (self.posterior_encoder.param_names + self.posterior_time.param_names
                + self.posterior_mark.param_names)

    def q_input(self, tape: Tape, mark: int, dt, dd, next_mark: int, remaining) -> Var:
        encoder = self.posterior_encoder
        return ops.concat(encoder.featurize(tape, mark, dt, dd),
                          encoder.featurize(tape, next_mark, remaining))

    def q_context(self, tape: Tape, q_state: Var, next_mark: int, remaining) -> Var:
        """Decoder input of q: its state next to the featurized end of the gap."""
        return ops.concat(q_state, self.posterior_encoder.featurize(tape, next_mark, remaining))

    def metadata(self) -> dict:
        metadata = self.observed.metadata()
        metadata.update({
            'kind': 'imtpp',
            'prior': {'mu': self.prior.mu_value, 'sigma2': self.prior.sigma2_value},
            'imtpp': {
                'max_missing': self.config.max_missing,
                'samples_per_gap': self.config.samples_per_gap,
                'prior_sigma2': self.config.prior_sigma2,
            },
        })
        return metadata

    def save(self, file) -> None:
        save_checkpoint(self.store, file, self.metadata())

    @classmethod
    def load(cls, file) -> 'ImtppModel':
        store, metadata = load_checkpoint(file)
        if metadata.get('kind') != 'imtpp':
            raise CheckpointError(f"expected an imtpp checkpoint, found {metadata.get('kind')!r}")
        parts = cls._components(metadata['vocab'], metadata['has_locations'],
                                ModelConfig(**metadata['model']), store, LossWeights(**metadata['weights']))
        prior = LogNormalParams(metadata['prior']['mu'], metadata['prior']['sigma2'])
        model = cls(*parts, prior, ImtppConfig(**metadata['imtpp']))
        expected = model.observed.param_names + model.posterior_param_names
        missing = [name for name in expected if name not in store]
        if missing:
            raise CheckpointError(f"checkpoint lacks parameters {missing}")
        return model


def _context_size(model_config: ModelConfig) -> int:
    return model_config.hidden_size + model_config.input_size


def prior_from_dataset(ds: Dataset, sigma2: float = 1.0) -> LogNormalParams:
    """Prior over missing gaps centred on half the median observed gap."""
    gaps = np.concatenate([np.diff(seq.times) for seq in ds if len(seq) >= 2] or [np.array([])])
    median = float(np.median(gaps)) if gaps.size else 1.0
    return LogNormalParams(math.log(median / 2.0), sigma2)


def sample_missing_between(model: ImtppModel, tape: Tape, q_state: Var, e_k: Event, e_next: Event,
                           noise: NoiseStream, max_count: Optional[int] = None) -> GapSample:
    """Draw missing events from q between two observed events.

    Gaps are drawn until a candidate reaches `e_next.time` (the candidate is
    discarded) or `max_count` events were accepted. q's state advances after
    every accepted event.
    """
    if not e_k.time < e_next.time:
        raise ValueError(f"gap start {e_k.time} must precede its end {e_next.time}")
    max_count = model.config.max_missing if max_count is None else max_count
    sample = GapSample(q_state=q_state, last_time=e_k.time)
    last_value = e_k.time
    while len(sample) < max_count:
        context = model.q_context(tape, sample.q_state, e_next.mark, e_next.time - sample.last_time)
        params = model.posterior_time.params(tape, context)
        gap = lognormal_sample(params, noise.normal())
        candidate = sample.last_time + gap
        value = float(candidate.value)
        if value >= e_next.time or not value > last_value:
            break
        logits = model.posterior_mark.logits(tape, context)
        mark = noise.choice(mark_probs(logits))
        sample.kl.append(_event_kl(model, params, logits))
        sample.events.append(MissingEvent(mark=mark, time=value))
        sample.gaps.append(gap)
        x = model.q_input(tape, mark, gap, None, e_next.mark, e_next.time - candidate)
        sample.q_state = model.posterior_encoder.step(tape, sample.q_state, x)
        sample.last_time = candidate
        last_value = value
    return sample


def _event_kl(model: ImtppModel, params: LogNormalParams, logits: Var) -> Var:
    return (kl_lognormal(params, model.prior)
            + kl_categorical(log_softmax(logits), model.prior_mark_probs))


def _value(x) -> float:
    return float(x.value) if isinstance(x, Var) else float(x)


def _exp(x):
    return ops.exp(x) if isinstance(x, Var) else math.exp(x)


@dataclass
class _GapStep:
    """One scored observed gap.

    Attributes:
        sample: The missing events carried into the merged stream
        recon: NLL of the gap's closing observed event
        kl: KL terms charged in this gap
        p_state: p's state after the closing event
        q_state: q's state before it consumes the closing event
        dt: Time from the last missing event (or the gap start) to the closing event
    """

    sample: GapSample
    recon: Var
    kl: List[Var]
    p_state: Optional[Var]
    q_state: Var
    dt: Union[float, Var]

    @property
    def kl_value(self) -> float:
        return float(sum(term.value for term in self.kl))


def _p_consume(model: ImtppModel, tape: Tape, p_state, mark, dt, dd):
    p = model.observed
    if p.config.constant_heads:
        return None
    return p.encoder.step(tape, p_state, p.encoder.featurize(tape, mark, dt, dd))


def _dd(deltas: DeltaView, k: int) -> Optional[float]:
    return None if deltas.dd is None else float(deltas.dd[k])


def _open_gap(model: ImtppModel, tape: Tape, seq: Sequence, deltas: DeltaView, k: int, q_prev,
              prev_dt) -> Var:
    e_k, e_next = seq[k], seq[k + 1]
    x = model.q_input(tape, e_k.mark, prev_dt, _dd(deltas, k), e_next.mark, float(deltas.dt[k + 1]))
    return model.posterior_encoder.step(tape, q_prev, x)


def _walk_gap(model: ImtppModel, tape: Tape, seq: Sequence, deltas: DeltaView, k: int,
              p_state, q_prev, prev_dt, noise: NoiseStream) -> _GapStep:
    """Score observed gap k -> k+1 along one sampled trajectory of missing events."""
    e_k, e_next = seq[k], seq[k + 1]
    q_state = _open_gap(model, tape, seq, deltas, k, q_prev, prev_dt)
    sample = sample_missing_between(model, tape, q_state, e_k, e_next, noise)
    for gap, event in zip(sample.gaps, sample.events):
        p_state = _p_consume(model, tape, p_state, event.mark, gap, None)
    dt = float(deltas.dt[k + 1]) if not sample.events else e_next.time - sample.last_time
    p = model.observed
    recon = p.weighted(p.event_terms(tape, p_state, e_next.mark, dt, _dd(deltas, k + 1)))
    p_state = _p_consume(model, tape, p_state, e_next.mark, dt, _dd(deltas, k + 1))
    return _GapStep(sample, recon, list(sample.kl), p_state, sample.q_state, dt)


@dataclass
class _Branch:
    """Where the gap walk stands after `count` missing events."""

    stop: float
    count: int
    p_state: Optional[Var]
    q_state: Var
    last_time: Union[float, Var]
    remaining: Union[float, Var]


def _expected_gap(model: ImtppModel, tape: Tape, seq: Sequence, deltas: DeltaView, k: int,
                  p_state, q_prev, prev_dt, noise: NoiseStream) -> _GapStep:
    """Score observed gap k -> k+1 with q's stopping decision summed out.

    After j missing events, with r time left, q's next gap overshoots with
    probability P(gap >= r); that path ends and p scores e_{k+1} after r. The
    other path continues with a gap drawn from q truncated to (0, r), so the
    same noise always yields an event inside the gap. Stop terms and KL terms
    are weighted by the probability of reaching them, which keeps the
    expectation of the single-trajectory estimate while letting the number of
    missing events respond smoothly to q's parameters. One stopping point is
    then drawn by its weight to carry p and q into the next gap.
    """
    e_k, e_next = seq[k], seq[k + 1]
    p = model.observed
    dd_next = _dd(deltas, k + 1)
    max_count = model.config.max_missing
    sample = GapSample(q_state=_open_gap(model, tape, seq, deltas, k, q_prev, prev_dt), last_time=e_k.time)
    remaining = float(deltas.dt[k + 1])
    log_reach = 0.0
    recon = None
    kl_terms: List[Var] = []
    branches: List[_Branch] = []
    while True:
        nll = p.weighted(p.event_terms(tape, p_state, e_next.mark, remaining, dd_next))
        params = logits = log_go = None
        if len(sample) < max_count:
            context = model.q_context(tape, sample.q_state, e_next.mark, remaining)
            params = model.posterior_time.params(tape, context)
            z = (ops.log(remaining) if isinstance(remaining, Var) else math.log(remaining)) - params.mu
            z = z / ops.sqrt(params.sigma2)
            log_go = ops.log_ndtr(z)
            stop = _exp(log_reach + ops.log_ndtr(-z))
        else:
            stop = _exp(log_reach)
        term = stop * nll
        recon = term if recon is None else recon + term
        branches.append(_Branch(_value(stop), len(sample), p_state, sample.q_state, sample.last_time, remaining))
        if log_go is None or _value(log_reach + log_go) < math.log(BRANCH_FLOOR):
            break

        gap = ops.exp(params.mu + ops.sqrt(params.sigma2) * ops.ndtri(noise.quantile() * ops.exp(log_go)))
        last_value = _value(sample.last_time)
        candidate = last_value + _value(gap)
        if not (last_value < candidate < e_next.time and _value(gap) < _value(remaining)):
            break
        logits = model.posterior_mark.logits(tape, context)
        mark = noise.choice(mark_probs(logits))
        event_kl = _event_kl(model, params, logits)
        kl_terms.append(_exp(log_reach + log_go) * event_kl)
        sample.kl.append(event_kl)
        sample.events.append(MissingEvent(mark=mark, time=candidate))
        sample.gaps.append(gap)
        p_state = _p_consume(model, tape, p_state, mark, gap, None)
        remaining = remaining - gap
        sample.q_state = model.posterior_encoder.step(
            tape, sample.q_state, model.q_input(tape, mark, gap, None, e_next.mark, remaining))
        sample.last_time = sample.last_time + gap
        log_reach = log_reach + log_go

    chosen = branches[noise.choice([branch.stop for branch in branches])]
    count = chosen.count
    kept = GapSample(sample.events[:count], sample.gaps[:count], sample.kl[:count],
                     chosen.q_state, chosen.last_time)
    p_state = _p_consume(model, tape, chosen.p_state, e_next.mark, chosen.remaining, dd_next)
    return _GapStep(kept, recon, kl_terms, p_state, chosen.q_state, chosen.remaining)


def _first_states(model: ImtppModel, tape: Tape, seq: Sequence, deltas: DeltaView):
    p = model.observed
    p_state = None
    if not p.config.constant_heads:
        p_state = _p_consume(model, tape, p.encoder.initial_state(tape), seq[0].mark, None, _dd(deltas, 0))
    return p_state, model.posterior_encoder.initial_state(tape)


@dataclass
class ElboTerms:
    """ELBO of one sequence with its parts.

    Attributes:
        elbo: -recon - kl
        recon: Expected NLL of the observed events after the first
        kl: Expected KL of the missing events; None when no path placed one
        samples: Per gap, the missing events that continued into the next gap
    """

    elbo: Var
    recon: Var
    kl: Optional[Var]
    samples: List[GapSample]


def elbo_graph(model: ImtppModel, tape: Tape, seq: Sequence, noise: NoiseStream) -> ElboTerms:
    """Estimate E_q[sum log p(e_{k+1})] - sum KL(q || prior) on the tape.

    Each gap is scored by `_expected_gap`: missing-event gaps are
    reparameterized draws and the number of missing events is summed out, so
    for fixed noise the estimate is a smooth function of p and q. When q
    cannot place an event anywhere the estimate is exactly -sequence_nll of p.

    Raises:
        ValueError: If the sequence has fewer than two events
        NonFiniteError: On a non-finite value, naming the gap index
    """
    if len(seq) < 2:
        raise ValueError(f"sequence {seq.id!r} has {len(seq)} event(s); at least 2 are needed")
    deltas = compute_deltas(seq)
    p_state, q_state = _first_states(model, tape, seq, deltas)
    prev_dt = None
    recon = None
    kl_terms: List[Var] = []
    samples = []
    for k in range(len(seq) - 1):
        try:
            step = _expected_gap(model, tape, seq, deltas, k, p_state, q_state, prev_dt, noise)
        except NonFiniteError as e:
            raise NonFiniteError(f"sequence {seq.id!r}, gap {k}: {e}") from e
        recon = step.recon if recon is None else recon + step.recon
        kl_terms += step.kl
        samples.append(step.sample)
        p_state, q_state, prev_dt = step.p_state, step.q_state, step.dt
    if not kl_terms:
        return ElboTerms(-recon, recon, None, samples)
    kl = kl_terms[0]
    for term in kl_terms[1:]:
        kl = kl + term
    return ElboTerms(-recon - kl, recon, kl, samples)


def elbo(model: ImtppModel, seq: Sequence, noise: Union[NoiseStream, int] = 0) -> float:
    if not isinstance(noise, NoiseStream):
        noise = NoiseStream(noise)
    return float(elbo_graph(model, Tape(model.store), seq, noise).elbo.value)


def mean_negative_elbo(model: ImtppModel, ds: Dataset, seed: int = 0) -> float:
    """Average per-event negative ELBO with one fixed noise stream per sequence (sorted by id)."""
    values = []
    for i, seq in enumerate(sorted(ds, key=lambda s: s.id)):
        if len(seq) >= 2:
            values.append(-elbo(model, seq, NoiseStream([seed, i])) / (len(seq) - 1))
    return float(np.mean(values)) if values else math.nan


def observed_nll_bound(model: ImtppModel, ds: Dataset, seed: int = 0, draws: int = 1) -> float:
    """Negative ELBO per observed event, pooled over the dataset.

    This bounds the NLL of the observed events with the missing ones
    marginalized, and is the held-out NLL reported for missing-event models.
    Each sequence averages `draws` fixed noise streams.
    """
    if draws < 1:
        raise ValueError(f"draws must be >= 1, got {draws}")
    total, count = 0.0, 0
    for i, seq in enumerate(sorted(ds, key=lambda s: s.id)):
        if len(seq) < 2:
            continue
        total -= np.mean([elbo(model, seq, NoiseStream([seed, i, d])) for d in range(draws)])
        count += len(seq) - 1
    return total / count if count else math.nan


def train_imtpp(model: ImtppModel, dataset: Dataset, config: TrainConfig,
                validation: Optional[Dataset] = None) -> Tuple[ImtppModel, LossTrace]:
    """Maximize the ELBO by Adam on its per-event negation.

    The returned trace holds the negative ELBO per epoch; `elbo_curve` flips its sign.
    """
    if len(dataset) == 0:
        raise ValueError("cannot train on an empty dataset")
    trained = model.copy().with_weights(config.weights)
    sequences = [seq for seq in dataset if len(seq) >= 2]
    if config.epochs and not sequences:
        raise ValueError("no sequence in the dataset has two or more events")

    def objective(tape, seq, noise):
        return -elbo_graph(trained, tape, seq, noise).elbo / (len(seq) - 1)

    validate = None
    if validation is not None and any(len(seq) >= 2 for seq in validation):
        def validate():
            return (mean_negative_elbo(trained, validation, config.seed),
                    mean_nll_components(trained.observed, validation))

    trace = fit_store(trained.store, sequences, objective, config, validate, label='imtpp')
    return trained, trace


def elbo_curve(trace: LossTrace) -> List[float]:
    return [-value for value in trace.train]


def _interpolate(seq: Sequence, k: int, time: float):
    if not seq.has_locations:
        return None
    (x0, y0), (x1, y1) = seq[k].location, seq[k + 1].location
    share = (time - seq[k].time) / (seq[k + 1].time - seq[k].time)
    return (x0 + share * (x1 - x0), y0 + share * (y1 - y0))


def impute(model: ImtppModel, seq: Sequence, samples_per_gap: Optional[int] = None,
           seed: int = 0) -> Sequence:
    """Insert posterior missing events into every observed gap.

    For each gap, `samples_per_gap` trajectories are drawn and the one with the
    highest ELBO contribution (reconstruction of the next observed event minus
    its KL) is kept. Imputed events are flagged and, for located sequences,
    placed by linear interpolation between the bracketing observed events.
    """
    samples_per_gap = model.config.samples_per_gap if samples_per_gap is None else samples_per_gap
    if samples_per_gap < 1:
        raise ValueError(f"samples_per_gap must be >= 1, got {samples_per_gap}")
    if len(seq) < 2:
        return seq
    parent = NoiseStream(seed)
    deltas = compute_deltas(seq)
    first = Tape(model.store)
    p_state, q_state = _first_states(model, first, seq, deltas)
    p_value = None if p_state is None else p_state.value
    q_value = q_state.value
    prev_dt = None
    merged = [seq[0]]
    for k in range(len(seq) - 1):
        best, best_score = None, -math.inf
        for _ in range(samples_per_gap):
            tape = Tape(model.store)
            step = _walk_gap(model, tape, seq, deltas, k,
                             None if p_value is None else tape.constant(p_value),
                             tape.constant(q_value), prev_dt, parent.spawn())
            score = -float(step.recon.value) - step.kl_value
            if score > best_score:
                best, best_score = step, score
        merged += [event.to_event(_interpolate(seq, k, event.time)) for event in best.sample.events]
        merged.append(seq[k + 1])
        p_value = None if best.p_state is None else best.p_state.value
        q_value = best.q_state.value
        prev_dt = float(best.dt.value) if isinstance(best.dt, Var) else best.dt
    logger.debug("imputed %d events into sequence %r", len(merged) - len(seq), seq.id)
    return seq.with_events(merged)


def impute_dataset(model: ImtppModel, ds: Dataset, samples_per_gap: Optional[int] = None,
                   seed: int = 0) -> Dataset:
    return ds.with_sequences(impute(model, seq, samples_per_gap, sequence_seed(seed, seq.id)) for seq in ds)


def forecast_with_missing(model: ImtppModel, prefix: Sequence, horizon: int, seed: int = 0,
                          deterministic: bool = False) -> List[Event]:
    """Impute the prefix's gaps, then roll p forward over the interleaved history."""
    history = impute(model, prefix, seed=seed)
    return forecast(model.observed, history, horizon, seed, deterministic)


def uniform_imputation(seq: Sequence, fraction: float, mark: Optional[int] = None) -> Sequence:
    """Baseline that spaces the expected number of missing events evenly in each gap.

    With deletion fraction f the true mean gap is about (1 - f) times the
    observed one, so a gap of length D holds floor(D / ((1 - f) * mean gap) - 1)
    missing events. Imputed events take `mark`, defaulting to the sequence's
    most frequent mark.
    """
    if not 0.0 <= fraction < 1.0:
        raise ValueError(f"deletion fraction must lie in [0, 1), got {fraction}")
    observed = seq.observed()
    if len(observed) < 2:
        return observed
    times = observed.times
    spacing = (1.0 - fraction) * float(np.mean(np.diff(times)))
    if mark is None:
        mark = int(np.bincount(observed.marks).argmax())
    merged = [observed[0]]
    for k in range(len(observed) - 1):
        span = times[k + 1] - times[k]
        count = max(int(math.floor(span / spacing - 1.0)), 0)
        for j in range(1, count + 1):
            time = times[k] + span * j / (count + 1)
            if times[k] < time < times[k + 1]:
                merged.append(Event(mark=mark, time=time, location=_interpolate(observed, k, time),
                                    imputed=True))
        merged.append(observed[k + 1])
    return observed.with_events(merged)
