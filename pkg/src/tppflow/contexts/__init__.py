"""Context data classes for tppflow operations."""

from .split import SplitContextData
from .deletion import DeletionContextData
from .fit import FitContextData
from .transfer import TransferContextData
from .metrics import MetricsContextData
from .forecast import ForecastContextData
from .imputation import ImputationContextData
from .hawkes import HawkesContextData
from .community import CommunityContextData

__all__ = [
    'SplitContextData',
    'DeletionContextData',
    'FitContextData',
    'TransferContextData',
    'MetricsContextData',
    'ForecastContextData',
    'ImputationContextData',
    'HawkesContextData',
    'CommunityContextData',
]
