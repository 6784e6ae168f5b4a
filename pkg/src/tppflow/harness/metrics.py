"""Next-event, imputation and forecast metrics.

Sequences are always visited in sorted id order so reductions do not depend
on dataset order.
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Mapping, Optional, Tuple, Union

import numpy as np

from ..core.events import Dataset, Event, Sequence, compute_deltas
from ..models.imtpp import ImtppModel, forecast_with_missing, observed_nll_bound
from ..models.mtpp import MtppModel, forecast, mean_nll_components, prefix_predictions, sequence_nll

logger = logging.getLogger(__name__)

TOP_K = (1, 5, 10)
TIME_POINT_ESTIMATE = 'median'

Model = Union[MtppModel, ImtppModel]


def _empty_sections() -> dict:
    return {
        'imputation': None,
        'forecast': None,
        'transfer': None,
        'hawkes': None,
        'community': None,
    }


@dataclass
class MetricsReport:
    """The structured result of a task.

    Every field is always present in `to_dict`; a metric that does not apply
    to a task is None and serializes as null.
    """

    time_mae: Optional[float] = None
    dist_mae: Optional[float] = None
    mark_accuracy_at_k: Dict[str, Optional[float]] = field(
        default_factory=lambda: {str(k): None for k in TOP_K})
    nll_per_event: Optional[float] = None
    nll_components: Dict[str, Optional[float]] = field(
        default_factory=lambda: {'mark': None, 'time': None, 'dist': None})
    num_predictions: int = 0
    elbo_final: Optional[float] = None
    sections: Dict[str, Optional[dict]] = field(default_factory=_empty_sections)
    metadata: Dict[str, object] = field(default_factory=dict)

    def to_dict(self) -> dict:
        result = {
            'time_mae': self.time_mae,
            'dist_mae': self.dist_mae,
            'mark_accuracy_at_k': {str(k): self.mark_accuracy_at_k.get(str(k)) for k in TOP_K},
            'nll_per_event': self.nll_per_event,
            'nll_components': {key: self.nll_components.get(key) for key in ('mark', 'time', 'dist')},
            'num_predictions': self.num_predictions,
            'elbo_final': self.elbo_final,
        }
        for name in _empty_sections():
            result[name] = self.sections.get(name)
        result['metadata'] = {'time_point_estimate': TIME_POINT_ESTIMATE, **self.metadata}
        return result


def observed_model(model: Model) -> MtppModel:
    return model.observed if isinstance(model, ImtppModel) else model


def align_dataset(model: Model, ds: Dataset) -> Dataset:
    """Express `ds` in the model's vocabulary.

    Raises:
        VocabularyMismatchError: If the dataset uses a mark the model does not know
    """
    base = observed_model(model)
    if tuple(ds.vocab) != tuple(base.vocab):
        ds = ds.with_vocab(base.vocab)
    if ds.has_locations and not base.has_locations:
        logger.info("model has no distance head; locations are ignored")
    return ds


def _rank_hits(probs: np.ndarray, mark: int) -> Dict[int, bool]:
    order = np.argsort(-probs, kind='stable')
    rank = int(np.nonzero(order == mark)[0][0])
    return {k: rank < k for k in TOP_K}


def evaluate(model: Model, test: Dataset) -> MetricsReport:
    """Next-event metrics over every prefix of every test sequence.

    Mark accuracy@k counts the true mark within the k most probable marks
    (ties broken by vocabulary order). Time MAE uses the median gap. A
    missing-event model is scored by its observed model p, except for
    `nll_per_event`, which is its negative ELBO per observed event.

    Raises:
        VocabularyMismatchError: If the vocabularies cannot be aligned
    """
    test = align_dataset(model, test)
    base = observed_model(model)
    hits = {k: 0 for k in TOP_K}
    time_errors: List[float] = []
    dist_errors: List[float] = []
    nll_total = 0.0
    for seq in sorted(test, key=lambda s: s.id):
        if len(seq) < 2:
            continue
        deltas = compute_deltas(seq)
        for k, prediction in enumerate(prefix_predictions(base, seq), start=1):
            for top, hit in _rank_hits(prediction.mark_probs, seq[k].mark).items():
                hits[top] += hit
            time_errors.append(abs(prediction.dt - float(deltas.dt[k])))
            if prediction.dd is not None and deltas.dd is not None:
                dist_errors.append(abs(prediction.dd - float(deltas.dd[k])))
        nll_total += sequence_nll(base, seq)

    report = MetricsReport()
    count = len(time_errors)
    report.num_predictions = count
    if count == 0:
        logger.warning("no test sequence has two or more events; metrics are empty")
        return report
    report.time_mae = float(np.mean(time_errors))
    report.dist_mae = float(np.mean(dist_errors)) if dist_errors else None
    report.mark_accuracy_at_k = {str(k): hits[k] / count for k in TOP_K}
    if isinstance(model, ImtppModel):
        # p alone scores the stream as if nothing were missing.
        report.nll_per_event = observed_nll_bound(model, test)
    else:
        report.nll_per_event = nll_total / count
    components = mean_nll_components(base, test)
    report.nll_components = {key: components[key] for key in ('mark', 'time', 'dist')}
    return report


@dataclass(frozen=True)
class ImputationScore:
    """Imputed-versus-deleted comparison.

    Attributes:
        matched_mae: Mean |t_imputed - t_true| over matched pairs; None without matches
        count_error: |#imputed - #deleted| / max(#deleted, 1)
    """

    matched_mae: Optional[float]
    count_error: float
    matches: int
    num_imputed: int
    num_deleted: int

    def to_dict(self) -> dict:
        return {
            'matched_mae': self.matched_mae,
            'count_error': self.count_error,
            'matches': self.matches,
            'num_imputed': self.num_imputed,
            'num_deleted': self.num_deleted,
        }


def _greedy_pairs(imputed: List[float], truth: List[float]) -> List[float]:
    pairs = sorted(((abs(a - b), i, j) for i, a in enumerate(imputed) for j, b in enumerate(truth)))
    used_i, used_j, errors = set(), set(), []
    for error, i, j in pairs:
        if i in used_i or j in used_j:
            continue
        used_i.add(i)
        used_j.add(j)
        errors.append(error)
    return errors


def _matched_errors(imputed: Sequence, deleted: Iterable[Event]) -> Tuple[List[float], int, int]:
    observed = [event.time for event in imputed if not event.imputed]
    fills = [event.time for event in imputed if event.imputed]
    truth = [event.time for event in deleted]
    errors = []
    for start, end in zip(observed, observed[1:]):
        errors += _greedy_pairs([t for t in fills if start < t < end], [t for t in truth if start < t < end])
    return errors, len(fills), len(truth)


def _score(errors: List[float], num_imputed: int, num_deleted: int) -> ImputationScore:
    return ImputationScore(
        matched_mae=float(np.mean(errors)) if errors else None,
        count_error=abs(num_imputed - num_deleted) / max(num_deleted, 1),
        matches=len(errors),
        num_imputed=num_imputed,
        num_deleted=num_deleted,
    )


def evaluate_imputation(imputed: Sequence, deleted: Iterable[Event]) -> ImputationScore:
    """Match imputed events to deleted ones greedily by time, within each observed gap.

    Each deleted event is matched at most once; deleted events outside the
    observed span stay unmatched.
    """
    return _score(*_matched_errors(imputed, list(deleted)))


def evaluate_imputation_dataset(imputed: Dataset, deleted: Mapping[str, List[Event]]) -> ImputationScore:
    """Pool matches and counts over all sequences."""
    errors, num_imputed, num_deleted = [], 0, 0
    for seq in sorted(imputed, key=lambda s: s.id):
        seq_errors, fills, truth = _matched_errors(seq, deleted.get(seq.id, []))
        errors += seq_errors
        num_imputed += fills
        num_deleted += truth
    return _score(errors, num_imputed, num_deleted)


@dataclass
class ForecastScore:
    horizon: int
    mae_per_step: List[Optional[float]]
    naive_mae_per_step: List[Optional[float]]
    num_sequences: int

    def to_dict(self) -> dict:
        return {
            'horizon': self.horizon,
            'mae_per_step': self.mae_per_step,
            'naive_mae_per_step': self.naive_mae_per_step,
            'num_sequences': self.num_sequences,
        }


def evaluate_forecast(model: Model, test: Dataset, horizon: int, mean_gap: float,
                      seed: int = 0) -> Tuple[ForecastScore, Dict[str, List[Event]]]:
    """Per-step absolute timestamp error of the deterministic rollout.

    Each sequence with more than `horizon` events is split into a prefix and
    its last `horizon` events. The naive baseline steps forward by `mean_gap`.
    """
    if horizon < 1:
        raise ValueError(f"horizon must be >= 1, got {horizon}")
    test = align_dataset(model, test)
    errors = [[] for _ in range(horizon)]
    naive = [[] for _ in range(horizon)]
    forecasts = {}
    for seq in sorted(test, key=lambda s: s.id):
        if len(seq) <= horizon:
            continue
        prefix = seq.prefix(len(seq) - horizon)
        if isinstance(model, ImtppModel):
            events = forecast_with_missing(model, prefix, horizon, seed, deterministic=True)
        else:
            events = forecast(model, prefix, horizon, seed, deterministic=True)
        forecasts[seq.id] = events
        last = prefix[-1].time
        for step, (predicted, actual) in enumerate(zip(events, seq[len(prefix):])):
            errors[step].append(abs(predicted.time - actual.time))
            naive[step].append(abs(last + (step + 1) * mean_gap - actual.time))

    def means(values):
        return [float(np.mean(v)) if v else None for v in values]

    score = ForecastScore(horizon, means(errors), means(naive), len(forecasts))
    if not forecasts:
        logger.warning("no test sequence is longer than the forecast horizon %d", horizon)
    return score, forecasts


def smoothed(values: Iterable[float], window: int = 10) -> List[float]:
    """Trailing moving average; the first entries average over what is available."""
    values = list(values)
    return [float(np.mean(values[max(0, i - window + 1):i + 1])) for i in range(len(values))]


def finite_or_none(value) -> Optional[float]:
    if value is None:
        return None
    value = float(value)
    return value if math.isfinite(value) else None
