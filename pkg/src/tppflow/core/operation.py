import logging
import os
import re
from abc import ABC, abstractmethod
from dataclasses import fields, is_dataclass

from .context import _jsonable
from .events import Dataset

logger = logging.getLogger(__name__)


def _describe_value(value):
    """JSON form of an operation argument; configs expand field by field."""
    if isinstance(value, os.PathLike):
        return os.fspath(value)
    if isinstance(value, Dataset):
        return {'sequences': len(value), 'events': value.num_events}
    if is_dataclass(value) and not isinstance(value, type):
        return {field.name: _describe_value(getattr(value, field.name)) for field in fields(value)}
    if isinstance(value, (set, frozenset)):
        return sorted(_describe_value(item) for item in value)
    if isinstance(value, (list, tuple)):
        return [_describe_value(item) for item in value]
    if isinstance(value, dict):
        return {str(key): _describe_value(item) for key, item in value.items()}
    return _jsonable(value)
class BaseOperation(ABC):
    """Base class for all steps of an event pipeline."""

    def __init__(self, *args, **kwargs):
        """Keep the construction arguments for logging and reruns."""
        self.args = args
        self.kwargs = kwargs

    def __call__(self, *args, **kwargs):
        logger.debug("running %s with %s", self.name, self.kwargs)
        return self.apply(*args, **kwargs)

    @property
    def name(self) -> str:
        return BaseOperation._get_operation_name(type(self))

    def describe(self) -> dict:
        """The step as recorded in a pack's provenance: name plus JSON-ready arguments."""
        step = {'operation': self.name, 'params': _describe_value(self.kwargs)}
        if self.args:
            step['args'] = _describe_value(self.args)
        return step

    @staticmethod
    def _get_operation_name(operation_class):
        """Get the operation name from a class.

        Args:
            operation_class: The operation class

        Returns:
            str: The operation name in snake_case
        """
        name = operation_class.__name__
        name = re.sub(r'([A-Z]+)([A-Z][a-z])', r'\1_\2', name)
        name = re.sub(r'([a-z\d])([A-Z])', r'\1_\2', name).lower()

        for suffix in ['_operation', '_producer', '_consumer']:
            if name.endswith(suffix):
                return name[:-len(suffix)]
        return name


class Operation(BaseOperation):
    """A pipeline step taking an EventPack and returning a new EventPack."""

    def __call__(self, pack):
        """Apply the step and append it to the result's provenance."""
        from .event_pack import EventPack

        result = super().__call__(pack)
        if isinstance(result, EventPack):
            if result is pack:
                result = pack.copy()
            result.record_step(self.describe())
        return result

    @abstractmethod
    def apply(self, pack):
        """Apply the step and return a new EventPack; the input pack is left untouched."""

    @classmethod
    def register(cls, name_or_class=None):
        """Register this operation as a chainable EventPack method.

        Preferred usage:
        @Operation.register  # Infers name from class name
        class SplitOperation(Operation):
            ...

        Alternative usages:
        @Operation.register('custom_name')  # Explicit name
        MyOperation.register()  # Manual registration (for tests)
        """
        from .event_pack import EventPack

        def _register_operation(operation_class, operation_name=None):
            if operation_name is None:
                operation_name = BaseOperation._get_operation_name(operation_class)
            EventPack.register_operation(operation_name, operation_class)
            return operation_class

        if name_or_class is None:
            return lambda operation_class: _register_operation(operation_class)
        if isinstance(name_or_class, str):
            return lambda operation_class: _register_operation(operation_class, name_or_class)
        return _register_operation(name_or_class)


class Consumer(BaseOperation):
    """A terminal step that reads an EventPack without returning one (e.g. writing artifacts)."""

    @abstractmethod
    def apply(self, pack):
        """Consume the pack."""
