"""Assemble metrics.json and curves.csv content from a finished pack."""
import json
import math
from typing import Optional

import pandas as pd

from ..models.imtpp import elbo_curve
from .metrics import MetricsReport

CURVE_COLUMNS = ['epoch', 'split', 'value']
REPORT_VERSION = 1


def _clean(value):
    """Replace NaN and infinities by None, recursively."""
    if isinstance(value, float):
        return value if math.isfinite(value) else None
    if isinstance(value, dict):
        return {key: _clean(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(item) for item in value]
    return value


def build_report(pack, task: str, seed: int, extra_metadata: Optional[dict] = None) -> dict:
    """The full, schema-stable report for a pack.

    Starts from the evaluation's MetricsReport (an empty one if the task did
    not evaluate) and fills the sections of the other contexts.
    """
    metrics = pack.get_context('metrics')
    report = metrics.report if metrics is not None else MetricsReport()
    sections = dict(report.sections)

    fit = pack.get_context('fit')
    if fit is not None and fit.kind == 'imtpp' and len(fit.trace) and report.elbo_final is None:
        report.elbo_final = elbo_curve(fit.trace)[-1]
    forecast = pack.get_context('forecast')
    if forecast is not None:
        sections['forecast'] = forecast.to_dict()
    transfer = pack.get_context('transfer')
    if transfer is not None:
        sections['transfer'] = transfer.to_dict()
    hawkes = pack.get_context('hawkes')
    if hawkes is not None:
        section = hawkes.to_dict()
        section['mu'] = hawkes.params.mu.tolist()
        section['A'] = hawkes.params.A.tolist()
        sections['hawkes'] = section
    community = pack.get_context('community')
    if community is not None:
        sections['community'] = community.to_dict()
    if sections['imputation'] is None and pack.has_context('imputation'):
        sections['imputation'] = pack.get_context('imputation').to_dict()
    report.sections = sections

    report.metadata = {
        'version': REPORT_VERSION,
        'task': task,
        'seed': seed,
        'model_kind': fit.kind if fit is not None else None,
        'dataset': {
            'sequences': len(pack.dataset),
            'events': pack.dataset.num_events,
            'marks': pack.dataset.num_marks,
            'has_locations': pack.dataset.has_locations,
        },
        'split': metrics.split if metrics is not None else None,
        'steps': list(pack.steps),
        **(extra_metadata or {}),
    }
    return _clean(report.to_dict())


def dumps_report(report: dict) -> str:
    return json.dumps(report, indent=2, ensure_ascii=False) + '\n'


def curves_frame(pack) -> pd.DataFrame:
    """Long-format training curves of every trained stage: epoch, split, value."""
    frames = []
    fit = pack.get_context('fit')
    if fit is not None:
        frames.append(fit.trace.to_frame())
        if fit.kind == 'imtpp':
            elbo = elbo_curve(fit.trace)
            frames.append(pd.DataFrame({'epoch': range(1, len(elbo) + 1), 'split': 'elbo', 'value': elbo},
                                       columns=CURVE_COLUMNS))
    transfer = pack.get_context('transfer')
    if transfer is not None:
        if transfer.source_trace is not None:
            frames.append(transfer.source_trace.to_frame('source_'))
        if transfer.scratch_trace is not None:
            frames.append(transfer.scratch_trace.to_frame('scratch_'))
    hawkes = pack.get_context('hawkes')
    if hawkes is not None and hawkes.losses:
        frames.append(pd.DataFrame({'epoch': range(1, len(hawkes.losses) + 1), 'split': 'hawkes',
                                    'value': hawkes.losses}, columns=CURVE_COLUMNS))
    frames = [frame for frame in frames if not frame.empty]
    if not frames:
        return pd.DataFrame(columns=CURVE_COLUMNS)
    return pd.concat(frames, ignore_index=True)[CURVE_COLUMNS]
