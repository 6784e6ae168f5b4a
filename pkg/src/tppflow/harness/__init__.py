"""Configuration, metrics, reports and the task runner."""

from .config import ExperimentConfig, TASKS, apply_overrides, config_from_dict, load_config
from .metrics import (
    ImputationScore,
    MetricsReport,
    evaluate,
    evaluate_forecast,
    evaluate_imputation,
    evaluate_imputation_dataset,
)
from .runner import run

__all__ = [
    'ExperimentConfig', 'TASKS', 'apply_overrides', 'config_from_dict', 'load_config',
    'ImputationScore', 'MetricsReport', 'evaluate', 'evaluate_forecast', 'evaluate_imputation',
    'evaluate_imputation_dataset', 'run',
]
