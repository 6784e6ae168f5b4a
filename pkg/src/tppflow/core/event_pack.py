import json
import logging
from typing import Any, Dict, List, Optional, Tuple

from .context import ContextData
from .events import Dataset
from .ingest import infer_format, parse_dataset, serialize_dataset

logger = logging.getLogger(__name__)


class EventPack:
    """Carrier for an event dataset flowing through a pipeline of operations.

    Registered operations become chainable methods:

        pack = EventPack.from_file('events.csv').split(seed=7).fit(epochs=20).evaluate()

    Each step returns a new pack carrying the (possibly transformed) dataset
    plus the structured contexts produced so far.
    """

    # Registry for operations
    _operations: Dict[str, type] = {}

    def __init__(self, dataset: Dataset, context_data: Optional[Dict[str, Any]] = None,
                 source_format: Optional[str] = None):
        self._dataset = dataset
        self._context_data = dict(context_data) if context_data is not None else {}
        self._structured_contexts: Dict[str, ContextData] = {}
        self._steps: Tuple[dict, ...] = ()
        self.source_format = source_format

    @property
    def dataset(self) -> Dataset:
        return self._dataset

    @property
    def context(self) -> Dict[str, Any]:
        """Free-form keyword context given at construction."""
        return self._context_data

    @staticmethod
    def from_bytes(payload: bytes, format: str = 'csv', **kwargs) -> 'EventPack':
        """Create an EventPack by parsing CSV or JSONL bytes.

        Raises:
            ParseError: If the payload cannot be parsed
        """
        return EventPack(parse_dataset(payload, format), context_data=kwargs, source_format=format)

    @staticmethod
    def from_file(file_path: str, format: Optional[str] = None, **kwargs) -> 'EventPack':
        """Create an EventPack from an event file, inferring the format from the extension.

        Raises:
            FileNotFoundError: If the file does not exist
            ParseError: If the file cannot be parsed
        """
        format = format or infer_format(file_path)
        try:
            with open(file_path, 'rb') as handle:
                payload = handle.read()
        except FileNotFoundError:
            raise FileNotFoundError(f"Event file not found: {file_path}") from None
        return EventPack.from_bytes(payload, format, **kwargs)

    def to_bytes(self, format: Optional[str] = None) -> bytes:
        return serialize_dataset(self._dataset, format or self.source_format or 'csv')

    def copy(self, new_dataset: Optional[Dataset] = None, **context_updates) -> 'EventPack':
        """Create a new EventPack sharing the contexts, optionally with a new dataset."""
        dataset = new_dataset if new_dataset is not None else self._dataset
        new_context = self._context_data.copy()
        new_context.update(context_updates)
        new_pack = EventPack(dataset, new_context, source_format=self.source_format)
        new_pack._structured_contexts = self._structured_contexts.copy()
        new_pack._steps = self._steps
        return new_pack

    @property
    def steps(self) -> Tuple[dict, ...]:
        """Operations applied so far, oldest first, each with its arguments."""
        return self._steps

    def record_step(self, step: dict) -> None:
        self._steps = self._steps + (step,)

    def add_context(self, context_data: ContextData, name: Optional[str] = None) -> None:
        """Attach structured context data, named after its class unless `name` is given."""
        if name is None:
            name = type(context_data)._get_context_name()
        self._structured_contexts[name] = context_data

    def get_context(self, name: str) -> Optional[ContextData]:
        return self._structured_contexts.get(name)

    def has_context(self, name: str) -> bool:
        return name in self._structured_contexts

    def remove_context(self, name: str) -> bool:
        """Remove structured context data; returns False if it was absent."""
        if name in self._structured_contexts:
            del self._structured_contexts[name]
            return True
        return False

    def get_all_contexts(self) -> Dict[str, ContextData]:
        return self._structured_contexts.copy()

    def require_context(self, name: str, operation_name: str = "operation") -> ContextData:
        """Return a context or raise naming the operations that produce it.

        Raises:
            ValueError: If the context is missing
        """
        context = self.get_context(name)
        if context is None:
            producers = sorted(ContextData.get_producer_operations(name))
            hint = f" Run {' or '.join(repr(p) for p in producers)} first." if producers else ""
            raise ValueError(f"{operation_name} requires a '{name}' context.{hint}")
        return context

    def to_json(self) -> str:
        """Summarize the pack (dataset shape and contexts) as JSON."""
        data = {
            'dataset': {
                'sequences': len(self._dataset),
                'events': self._dataset.num_events,
                'vocab': list(self._dataset.vocab),
                'has_locations': self._dataset.has_locations,
            },
            'context_data': self._context_data,
            'steps': list(self._steps),
            'structured_contexts': {
                name: context.to_dict() for name, context in self._structured_contexts.items()
            },
        }
        return json.dumps(data, indent=2)

    def get_missing_contexts(self, required_contexts: list) -> List[str]:
        return [name for name in required_contexts if not self.has_context(name)]

    def log_missing_contexts(self, required_contexts: list, operation_name: str = "operation") -> None:
        """Warn about missing contexts and suggest the operations that produce them."""
        missing = self.get_missing_contexts(required_contexts)
        if not missing:
            return
        logger.warning("%s requires missing contexts: %s", operation_name, missing)
        for context_name in missing:
            for producer in sorted(ContextData.get_producer_operations(context_name)):
                logger.warning("  - Run '%s' operation to generate '%s' context", producer, context_name)

    @classmethod
    def register_operation(cls, name, operation_class):
        cls._operations[name] = operation_class

    def __getattr__(self, name):
        """Dynamically create operation methods."""
        if name in self._operations:
            operation_class = self._operations[name]

            def operation_method(*args, **kwargs):
                operation = operation_class(*args, **kwargs)
                return operation(self)
            return operation_method
        raise AttributeError(f"'{self.__class__.__name__}' object has no attribute '{name}'")
