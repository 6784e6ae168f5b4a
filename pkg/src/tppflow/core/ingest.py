import io
import json
import logging
import os
import re
from typing import BinaryIO, Optional, Union

import numpy as np
import pandas as pd

from .errors import MalformedSequenceError, ParseError
from .events import Dataset, Event, Sequence

logger = logging.getLogger(__name__)

FORMATS = ('csv', 'jsonl')
REQUIRED_COLUMNS = ('seq_id', 'time', 'mark')

Source = Union[bytes, str, BinaryIO]


def infer_format(path: str) -> str:
    """Infer the event file format from a path's extension."""
    extension = os.path.splitext(path)[1].lstrip('.').lower()
    if extension in ('jsonl', 'ndjson'):
        return 'jsonl'
    if extension == 'csv':
        return 'csv'
    raise ParseError(f"cannot infer event format from {path!r}; expected .csv or .jsonl")


def _read_bytes(source: Source) -> bytes:
    if isinstance(source, bytes):
        return source
    if isinstance(source, str):
        return source.encode('utf-8')
    return source.read()


def _parse_csv(payload: bytes) -> pd.DataFrame:
    try:
        frame = pd.read_csv(
            io.BytesIO(payload), dtype=str, keep_default_na=False, encoding='utf-8'
        )
    except pd.errors.EmptyDataError:
        return pd.DataFrame(columns=list(REQUIRED_COLUMNS))
    except pd.errors.ParserError as e:
        match = re.search(r"line (\d+)", str(e))
        raise ParseError(str(e), line=int(match.group(1)) if match else None) from e
    frame.columns = [str(column).strip() for column in frame.columns]
    missing = [column for column in REQUIRED_COLUMNS if column not in frame.columns]
    if missing:
        raise ParseError(f"CSV header lacks required columns {missing}", line=1)
    if ('x' in frame.columns) != ('y' in frame.columns):
        raise ParseError("CSV location columns must come as an x,y pair", line=1)
    # Data rows start on line 2, after the header.
    frame['_line'] = np.arange(len(frame)) + 2
    return frame


def _parse_jsonl(payload: bytes) -> pd.DataFrame:
    rows = []
    for number, raw in enumerate(payload.decode('utf-8').splitlines(), start=1):
        if not raw.strip():
            continue
        try:
            record = json.loads(raw)
        except json.JSONDecodeError as e:
            raise ParseError(f"invalid JSON: {e.msg}", line=number) from e
        if not isinstance(record, dict):
            raise ParseError("each line must hold a JSON object", line=number)
        missing = [key for key in REQUIRED_COLUMNS if key not in record]
        if missing:
            raise ParseError(f"missing keys {missing}", line=number)
        row = {'seq_id': str(record['seq_id']), 'time': record['time'],
               'mark': str(record['mark']), '_line': number}
        loc = record.get('loc')
        if loc is not None:
            if not isinstance(loc, (list, tuple)) or len(loc) != 2:
                raise ParseError("loc must be a two-element list", line=number)
            row['x'], row['y'] = loc
        row['imputed'] = int(bool(record.get('imputed', 0)))
        region = record.get('region')
        row['region'] = '' if region is None else str(region)
        rows.append(row)
    if not rows:
        return pd.DataFrame(columns=list(REQUIRED_COLUMNS))
    return pd.DataFrame(rows)


def _numeric(frame: pd.DataFrame, column: str) -> np.ndarray:
    raw = frame[column]
    text = raw.astype(str).str.strip()
    try:
        # Per-value float() reads back repr() output bit for bit; pandas' fast parser does not.
        values = text.astype(np.float64).to_numpy()
    except ValueError:
        values = pd.to_numeric(text.where(text != '', 'nan'), errors='coerce').to_numpy(dtype=np.float64)
        if np.isfinite(values).all():
            values = np.full(len(text), np.nan)
    bad = ~np.isfinite(values)
    if bad.any():
        position = int(np.flatnonzero(bad)[0])
        line = int(frame['_line'].iloc[position])
        raise ParseError(f"cannot read {column}={raw.iloc[position]!r} as a finite number", line=line)
    return values


def _build_dataset(frame: pd.DataFrame) -> Dataset:
    if frame.empty:
        return Dataset()
    frame = frame.copy()
    frame['seq_id'] = frame['seq_id'].astype(str)
    frame['mark'] = frame['mark'].astype(str).str.strip()
    frame['time'] = _numeric(frame, 'time')

    has_locations = False
    if 'x' in frame.columns:
        present = (frame['x'].astype(str).str.strip() != '') | (frame['y'].astype(str).str.strip() != '')
        if present.any():
            has_locations = True
            frame['x'] = _numeric(frame, 'x')
            frame['y'] = _numeric(frame, 'y')

    imputed = np.zeros(len(frame), dtype=bool)
    if 'imputed' in frame.columns:
        flags = frame['imputed'].astype(str).str.strip()
        imputed = flags.isin(['1', 'true', 'True']).to_numpy()
    frame['imputed'] = imputed
    if 'region' in frame.columns:
        frame['region'] = frame['region'].astype(str).str.strip()
    else:
        frame['region'] = ''

    vocab = tuple(pd.unique(frame['mark']))
    index_of = {name: i for i, name in enumerate(vocab)}

    sequences = []
    for seq_id, group in frame.groupby('seq_id', sort=False):
        group = group.sort_values('time', kind='mergesort')
        times = group['time'].to_numpy()
        ties = np.flatnonzero(np.diff(times) == 0.0)
        if ties.size:
            line = int(group['_line'].iloc[ties[0] + 1])
            raise MalformedSequenceError(
                f"sequence {seq_id!r}: duplicate timestamp {times[ties[0]]} (line {line})",
                index=int(ties[0]) + 1,
            )
        events = []
        for row in group.itertuples(index=False):
            location = (row.x, row.y) if has_locations else None
            events.append(Event(mark=index_of[row.mark], time=row.time,
                                location=location, imputed=bool(row.imputed)))
        region = group['region'].iloc[0] or None
        sequences.append(Sequence(id=str(seq_id), events=events, region=region))
    logger.debug("parsed %d sequences over %d marks", len(sequences), len(vocab))
    return Dataset(sequences=sequences, vocab=vocab, has_locations=has_locations)


def parse_dataset(source: Source, format: str = 'csv') -> Dataset:
    """Parse an event stream into a Dataset.

    Sequences are grouped by `seq_id` in first-appearance order and sorted by time;
    the vocabulary lists distinct mark strings in order of first appearance.

    Args:
        source: Raw bytes, text, or a binary file object
        format: 'csv' or 'jsonl'

    Raises:
        ParseError: If a row cannot be parsed (message carries the line number)
        MalformedSequenceError: If two events of one sequence share a timestamp
    """
    if format not in FORMATS:
        raise ParseError(f"unknown event format {format!r}; expected one of {FORMATS}")
    payload = _read_bytes(source)
    if not payload.strip():
        return Dataset()
    frame = _parse_csv(payload) if format == 'csv' else _parse_jsonl(payload)
    return _build_dataset(frame)


def serialize_dataset(ds: Dataset, format: str = 'csv') -> bytes:
    """Serialize a Dataset so that `parse_dataset` reads it back unchanged."""
    if format not in FORMATS:
        raise ParseError(f"unknown event format {format!r}; expected one of {FORMATS}")
    any_imputed = any(event.imputed for seq in ds for event in seq)
    any_region = any(seq.region is not None for seq in ds)
    if format == 'jsonl':
        lines = []
        for seq in ds:
            for event in seq:
                record = {'seq_id': seq.id, 'time': event.time, 'mark': ds.vocab[event.mark]}
                if event.location is not None:
                    record['loc'] = list(event.location)
                if any_imputed:
                    record['imputed'] = int(event.imputed)
                if seq.region is not None:
                    record['region'] = seq.region
                lines.append(json.dumps(record))
        return ('\n'.join(lines) + '\n').encode('utf-8') if lines else b''

    rows = []
    for seq in ds:
        for event in seq:
            row = {'seq_id': seq.id, 'time': repr(event.time), 'mark': ds.vocab[event.mark]}
            if ds.has_locations:
                row['x'] = repr(event.location[0])
                row['y'] = repr(event.location[1])
            if any_imputed:
                row['imputed'] = int(event.imputed)
            if any_region:
                row['region'] = seq.region or ''
            rows.append(row)
    columns = list(REQUIRED_COLUMNS) + (['x', 'y'] if ds.has_locations else []) + (['imputed'] if any_imputed else [])
    columns += ['region'] if any_region else []
    frame = pd.DataFrame(rows, columns=columns)
    return frame.to_csv(index=False, lineterminator='\n').encode('utf-8')


def read_dataset(path: str, format: Optional[str] = None) -> Dataset:
    """Read an event file, inferring the format from its extension when omitted."""
    with open(path, 'rb') as handle:
        return parse_dataset(handle, format or infer_format(path))


def write_dataset(ds: Dataset, path: str, format: Optional[str] = None) -> None:
    with open(path, 'wb') as handle:
        handle.write(serialize_dataset(ds, format or infer_format(path)))
