from .errors import (
    CheckpointError,
    ConfigError,
    DomainError,
    MalformedSequenceError,
    NonFiniteError,
    ParseError,
    ShapeError,
    TppflowError,
    UnstableProcessError,
    VocabularyMismatchError,
)
from .events import Dataset, DeltaView, Event, Sequence, compute_deltas, delete_events, split_dataset
from .ingest import parse_dataset, read_dataset, serialize_dataset, write_dataset
from .noise import NoiseStream
from .context import ContextData
from .event_pack import EventPack
from .operation import BaseOperation, Consumer, Operation
