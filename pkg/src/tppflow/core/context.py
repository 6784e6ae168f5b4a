import re
from typing import Any, Dict, Optional, Set, Type

import numpy as np


def _jsonable(value: Any) -> Any:
    """Convert a context attribute to something `json.dumps` accepts."""
    if value is None or isinstance(value, (bool, int, float, str)):
        return value
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, dict):
        return {str(key): _jsonable(item) for key, item in value.items()}
    if isinstance(value, (list, tuple, set, frozenset)):
        return [_jsonable(item) for item in value]
    if hasattr(value, 'to_dict'):
        return value.to_dict()
    return type(value).__name__


class ContextData:
    """Base class for structured results attached to an EventPack.

    Context data is the hand-off between the operation that produces a result
    (a split, a trained model, a metrics report) and the operations that
    consume it. The class keeps a registry of which operations produce which
    context, so a missing context can be reported together with the step
    that would create it.
    """

    # Registry for operations that produce each context type
    _producer_operations: Dict[str, Set[str]] = {}
    _context_classes: Dict[str, Type['ContextData']] = {}

    def __init_subclass__(cls, **kwargs):
        super().__init_subclass__(**kwargs)
        ContextData._context_classes[cls._get_context_name()] = cls

    @classmethod
    def _get_context_name(cls):
        """Get the context name from the class name.

        Returns:
            str: The context name in snake_case
        """
        name = cls.__name__
        name = re.sub(r'([A-Z]+)([A-Z][a-z])', r'\1_\2', name)
        name = re.sub(r'([a-z\d])([A-Z])', r'\1_\2', name).lower()

        if name.endswith('_context_data'):
            return name[:-len('_context_data')]
        elif name.endswith('_context'):
            return name[:-len('_context')]
        else:
            return name

    @classmethod
    def get_context_class(cls, name: str) -> Optional[Type['ContextData']]:
        return cls._context_classes.get(name)

    @classmethod
    def register_as_producer(cls, operation_class=None):
        """Decorator to register an operation as a producer of this context type.

        Usage:
        @SplitContextData.register_as_producer
        class SplitOperation(Operation):
            ...
        """
        def decorator(op_class):
            # Local import to avoid circular dependency
            from .operation import BaseOperation

            operation_name = BaseOperation._get_operation_name(op_class)
            cls.register_producer_operation(cls._get_context_name(), operation_name)
            return op_class

        if operation_class is not None:
            return decorator(operation_class)
        return decorator

    @classmethod
    def register_producer_operation(cls, context_name: str, operation_name: str) -> None:
        cls._producer_operations.setdefault(context_name, set()).add(operation_name)

    @classmethod
    def get_producer_operations(cls, context_name: str) -> Set[str]:
        """Get the names of operations that produce a context type."""
        return cls._producer_operations.get(context_name, set())

    @classmethod
    def get_all_producer_operations(cls) -> Dict[str, Set[str]]:
        return {name: set(ops) for name, ops in cls._producer_operations.items()}

    def to_dict(self) -> Dict[str, Any]:
        """JSON-friendly view of the public attributes.

        Models and datasets appear by type name; subclasses override this to
        expose a richer summary.
        """
        return {
            key: _jsonable(value)
            for key, value in vars(self).items()
            if not key.startswith('_')
        }

    def __repr__(self) -> str:
        fields = ', '.join(f"{key}={value!r}" for key, value in self.to_dict().items())
        return f"{self.__class__.__name__}({fields})"
