import math
from dataclasses import dataclass, replace
from typing import Iterator, List, Optional, Tuple

import numpy as np

from .errors import MalformedSequenceError, VocabularyMismatchError

# Floor for the first inter-arrival time when a sequence starts exactly at the origin.
FIRST_GAP_FLOOR = 1e-9


@dataclass(frozen=True)
class Event:
    """A single marked event, optionally located in the plane.

    Attributes:
        mark: Index into the dataset's mark vocabulary
        time: Non-negative occurrence time
        location: Optional (x, y) pair
        imputed: True for events inserted by an imputation model
    """

    mark: int
    time: float
    location: Optional[Tuple[float, float]] = None
    imputed: bool = False

    def __post_init__(self):
        object.__setattr__(self, 'mark', int(self.mark))
        object.__setattr__(self, 'time', float(self.time))
        if not math.isfinite(self.time) or self.time < 0:
            raise MalformedSequenceError(f"event time must be finite and >= 0, got {self.time}")
        if self.mark < 0:
            raise MalformedSequenceError(f"event mark must be >= 0, got {self.mark}")
        if self.location is not None:
            object.__setattr__(self, 'location', (float(self.location[0]), float(self.location[1])))


@dataclass(frozen=True)
class Sequence:
    """A strictly time-ordered run of events belonging to one entity."""

    id: str
    events: Tuple[Event, ...] = ()
    region: Optional[str] = None

    def __post_init__(self):
        events = tuple(self.events)
        object.__setattr__(self, 'events', events)
        for index in range(1, len(events)):
            if not events[index].time > events[index - 1].time:
                raise MalformedSequenceError(
                    f"sequence {self.id!r}: time {events[index].time} at index {index} "
                    f"does not exceed {events[index - 1].time}",
                    index=index,
                )
        located = {event.location is not None for event in events}
        if len(located) > 1:
            raise MalformedSequenceError(
                f"sequence {self.id!r}: either every event has a location or none does"
            )

    def __len__(self) -> int:
        return len(self.events)

    def __iter__(self) -> Iterator[Event]:
        return iter(self.events)

    def __getitem__(self, index):
        return self.events[index]

    @property
    def times(self) -> np.ndarray:
        return np.array([event.time for event in self.events], dtype=np.float64)

    @property
    def marks(self) -> np.ndarray:
        return np.array([event.mark for event in self.events], dtype=np.int64)

    @property
    def has_locations(self) -> bool:
        return bool(self.events) and self.events[0].location is not None

    @property
    def locations(self) -> Optional[np.ndarray]:
        if not self.has_locations:
            return None
        return np.array([event.location for event in self.events], dtype=np.float64)

    def prefix(self, length: int) -> 'Sequence':
        """Return the sequence made of the first `length` events."""
        return replace(self, events=self.events[:length])

    def with_events(self, events) -> 'Sequence':
        return replace(self, events=tuple(events))

    def shifted(self, offset: float) -> 'Sequence':
        """Return a copy with every timestamp moved by `offset`."""
        return self.with_events(replace(event, time=event.time + offset) for event in self.events)

    def observed(self) -> 'Sequence':
        """Drop imputed events, keeping the originally observed ones."""
        return self.with_events(event for event in self.events if not event.imputed)


@dataclass(frozen=True)
class Dataset:
    """A collection of sequences sharing one mark vocabulary."""

    sequences: Tuple[Sequence, ...] = ()
    vocab: Tuple[str, ...] = ()
    has_locations: bool = False

    def __post_init__(self):
        object.__setattr__(self, 'sequences', tuple(self.sequences))
        object.__setattr__(self, 'vocab', tuple(self.vocab))
        size = len(self.vocab)
        for seq in self.sequences:
            for index, event in enumerate(seq.events):
                if event.mark >= size:
                    raise MalformedSequenceError(
                        f"sequence {seq.id!r}: mark {event.mark} at index {index} "
                        f"outside a vocabulary of {size}",
                        index=index,
                    )
            if seq.events and seq.has_locations != self.has_locations:
                raise MalformedSequenceError(
                    f"sequence {seq.id!r}: location presence disagrees with the dataset"
                )

    def __len__(self) -> int:
        return len(self.sequences)

    def __iter__(self) -> Iterator[Sequence]:
        return iter(self.sequences)

    @property
    def num_marks(self) -> int:
        return len(self.vocab)

    @property
    def num_events(self) -> int:
        return sum(len(seq) for seq in self.sequences)

    def with_sequences(self, sequences) -> 'Dataset':
        return replace(self, sequences=tuple(sequences))

    def subset(self, indices) -> 'Dataset':
        return self.with_sequences(self.sequences[int(i)] for i in indices)

    def by_id(self) -> dict:
        return {seq.id: seq for seq in self.sequences}

    def with_vocab(self, vocab) -> 'Dataset':
        """Re-index marks against `vocab`, which must contain every mark name of this dataset.

        Raises:
            VocabularyMismatchError: If a mark name is missing from `vocab`
        """
        vocab = tuple(vocab)
        if vocab == self.vocab:
            return self
        index = {name: i for i, name in enumerate(vocab)}
        missing = [name for name in self.vocab if name not in index]
        if missing:
            raise VocabularyMismatchError(f"marks {missing} are not in the model vocabulary")
        mapping = [index[name] for name in self.vocab]
        sequences = [seq.with_events(replace(event, mark=mapping[event.mark]) for event in seq)
                     for seq in self.sequences]
        return Dataset(sequences, vocab, self.has_locations)


@dataclass(frozen=True, eq=False)
class DeltaView:
    """Per-event inter-arrival times and inter-event distances."""

    dt: np.ndarray
    dd: Optional[np.ndarray] = None

    def __len__(self) -> int:
        return len(self.dt)


def compute_deltas(seq: Sequence) -> DeltaView:
    """Compute inter-arrival times (with t_0 := 0) and Euclidean step distances.

    Args:
        seq: A valid sequence

    Returns:
        DeltaView whose dt entries are all strictly positive and whose dd entries
        start at 0 for the first event (None when the sequence has no locations).

    Raises:
        MalformedSequenceError: If timestamps are not strictly increasing
    """
    times = seq.times
    dt = np.diff(times, prepend=0.0)
    if len(dt) and dt[0] <= 0.0:
        dt[0] = FIRST_GAP_FLOOR
    bad = np.flatnonzero(dt[1:] <= 0.0)
    if bad.size:
        index = int(bad[0]) + 1
        raise MalformedSequenceError(
            f"sequence {seq.id!r}: non-increasing timestamp at index {index}", index=index
        )
    dd = None
    locations = seq.locations
    if locations is not None:
        steps = np.diff(locations, axis=0)
        dd = np.concatenate([[0.0], np.hypot(steps[:, 0], steps[:, 1])])
    return DeltaView(dt=dt, dd=dd)


def split_dataset(ds: Dataset, ratios=(0.8, 0.1, 0.1), seed: int = 0) -> Tuple[Dataset, Dataset, Dataset]:
    """Partition a dataset into train/validation/test at sequence granularity.

    Split sizes follow the largest-remainder rule, so 10 sequences with ratios
    (0.8, 0.1, 0.1) give (8, 1, 1). A split that would come out empty takes one
    sequence from the largest, so 3 sequences split (1, 1, 1).

    Raises:
        ValueError: If ratios are not positive, do not sum to 1, or there are
            fewer sequences than splits
    """
    ratios = tuple(float(r) for r in ratios)
    if len(ratios) != 3 or any(r <= 0 for r in ratios):
        raise ValueError(f"split ratios must be three positive numbers, got {ratios}")
    if abs(sum(ratios) - 1.0) > 1e-9:
        raise ValueError(f"split ratios must sum to 1, got {sum(ratios)}")
    n = len(ds)
    if n < len(ratios):
        raise ValueError(f"cannot split {n} sequences into {len(ratios)} parts")

    raw = np.array(ratios) * n
    sizes = np.floor(raw).astype(int)
    remainder = n - int(sizes.sum())
    # Largest fractional parts first; ties go to the earlier split.
    order = sorted(range(len(ratios)), key=lambda i: (-(raw[i] - sizes[i]), i))
    for i in order[:remainder]:
        sizes[i] += 1
    # Every split keeps at least one sequence, taken from the largest.
    for i in np.flatnonzero(sizes == 0):
        sizes[int(np.argmax(sizes))] -= 1
        sizes[i] = 1

    permutation = np.random.default_rng(seed).permutation(n)
    bounds = np.cumsum(sizes)[:-1]
    parts = np.split(permutation, bounds)
    return tuple(ds.subset(part) for part in parts)


def delete_events(seq: Sequence, fraction: float, seed: int = 0) -> Tuple[Sequence, List[Event]]:
    """Drop interior events independently with probability `fraction`.

    The first and last events are always retained so every deleted event stays
    bracketed by observed ones.

    Returns:
        The observed sequence and the deleted events in time order.
    """
    if not 0.0 <= fraction < 1.0:
        raise ValueError(f"deletion fraction must lie in [0, 1), got {fraction}")
    events = seq.events
    if len(events) <= 2 or fraction == 0.0:
        return seq, []
    rng = np.random.default_rng(seed)
    drop = rng.random(len(events) - 2) < fraction
    kept = [events[0]]
    deleted = []
    for event, dropped in zip(events[1:-1], drop):
        (deleted if dropped else kept).append(event)
    kept.append(events[-1])
    return seq.with_events(kept), deleted
