from .core.event_pack import EventPack
from .core.operation import BaseOperation, Consumer, Operation
from .core.context import ContextData

# Import context classes to register them
from . import contexts

# Import operations to trigger registration
from . import operations

__version__ = "0.1.0"
__all__ = ["EventPack", "BaseOperation", "Operation", "Consumer", "ContextData"]
