"""Experiment configuration loaded from a JSON file.

Example:

    {
      "task": "fit",
      "seed": 3,
      "output_dir": "runs/fit",
      "data": {"path": "events.csv", "split": [0.8, 0.1, 0.1]},
      "model": {"hidden_size": 16},
      "train": {"epochs": 10, "weights": {"dist": 0.5}}
    }

Unknown keys are rejected with the dotted path of the offending key.
Relative paths resolve against the directory of the config file.
"""
import dataclasses
import json
import logging
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Dict, Optional, Tuple

from ..core.errors import ConfigError
from ..core.ingest import FORMATS
from ..core.synthetic import GENERATORS
from ..models.hawkes import HawkesFitConfig
from ..models.imtpp import ImtppConfig
from ..models.mtpp import ModelConfig
from ..models.training import LossWeights, TrainConfig
from ..models.transfer import TransferConfig

logger = logging.getLogger(__name__)

TASKS = ('simulate', 'simulate-hawkes', 'fit', 'fit-imtpp', 'fit-hawkes', 'transfer', 'impute',
         'forecast', 'evaluate')
TASK_ALIASES = {'imtpp': 'fit-imtpp', 'hawkes': 'fit-hawkes'}


@dataclass(frozen=True)
class DataConfig:
    """Where events come from.

    Attributes:
        path: Event file (.csv or .jsonl); None means use the synthetic section
        format: Override of the extension-based format
        split: (train, validation, test) ratios
        delete_fraction: MCAR deletion applied after loading, if set
        checkpoint: Saved model for the impute/forecast/evaluate tasks
    """

    path: Optional[str] = None
    format: Optional[str] = None
    split: Tuple[float, float, float] = (0.8, 0.1, 0.1)
    delete_fraction: Optional[float] = None
    checkpoint: Optional[str] = None

    def __post_init__(self):
        if self.format is not None and self.format not in FORMATS:
            raise ConfigError(f"format must be one of {FORMATS}, got {self.format!r}", key='data.format')
        split = tuple(float(r) for r in self.split)
        if len(split) != 3 or any(r <= 0 for r in split) or abs(sum(split) - 1.0) > 1e-9:
            raise ConfigError(f"split must be three positive ratios summing to 1, got {self.split}",
                              key='data.split')
        object.__setattr__(self, 'split', split)
        if self.delete_fraction is not None and not 0.0 <= self.delete_fraction < 1.0:
            raise ConfigError(f"delete_fraction must lie in [0, 1), got {self.delete_fraction}",
                              key='data.delete_fraction')


@dataclass(frozen=True)
class SyntheticConfig:
    """Generator used when no data path is given; `params` go to the generator."""

    generator: str = 'lognormal'
    num_sequences: int = 100
    length: int = 50
    params: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.generator not in GENERATORS:
            raise ConfigError(f"unknown generator {self.generator!r}; expected one of {sorted(GENERATORS)}",
                              key='synthetic.generator')
        if self.num_sequences < 1:
            raise ConfigError("num_sequences must be >= 1", key='synthetic.num_sequences')
        if self.length < 1:
            raise ConfigError("length must be >= 1", key='synthetic.length')


@dataclass(frozen=True)
class HawkesConfig:
    """Hawkes simulation and fitting settings.

    Generating parameters come from explicit `mu`/`A`, or from `block_sizes`
    with `base_rate` everywhere and `within`/`cross` excitation.
    """

    beta: float = 1.0
    horizon: float = 100.0
    num_sequences: int = 50
    mu: Optional[Tuple[float, ...]] = None
    A: Optional[Tuple[Tuple[float, ...], ...]] = None
    block_sizes: Optional[Tuple[int, ...]] = None
    base_rate: float = 0.1
    within: float = 0.4
    cross: float = 0.05
    K: Optional[int] = None
    epochs: int = 500
    learning_rate: float = 0.05

    def __post_init__(self):
        if not self.beta > 0:
            raise ConfigError(f"beta must be positive, got {self.beta}", key='hawkes.beta')
        if not self.horizon > 0:
            raise ConfigError(f"horizon must be positive, got {self.horizon}", key='hawkes.horizon')
        if self.num_sequences < 1:
            raise ConfigError("num_sequences must be >= 1", key='hawkes.num_sequences')
        if (self.mu is None) != (self.A is None):
            raise ConfigError("mu and A must be given together", key='hawkes.A' if self.A is None else 'hawkes.mu')
        if self.K is not None and self.K < 1:
            raise ConfigError(f"K must be >= 1, got {self.K}", key='hawkes.K')
        self.fit_config(0)

    def fit_config(self, seed: int) -> HawkesFitConfig:
        return HawkesFitConfig(epochs=self.epochs, learning_rate=self.learning_rate, seed=seed)


@dataclass(frozen=True)
class ForecastConfig:
    horizon: int = 5

    def __post_init__(self):
        if self.horizon < 1:
            raise ConfigError(f"horizon must be >= 1, got {self.horizon}", key='forecast.horizon')


SECTIONS = {
    'data': DataConfig,
    'synthetic': SyntheticConfig,
    'model': ModelConfig,
    'train': TrainConfig,
    'imtpp': ImtppConfig,
    'transfer': TransferConfig,
    'hawkes': HawkesConfig,
    'forecast': ForecastConfig,
}


@dataclass(frozen=True)
class ExperimentConfig:
    """A complete, validated experiment.

    The top-level seed is the only seed: it replaces the seeds of the train
    and transfer sections, so `(config, seed)` alone determines a run.
    """

    task: str
    seed: int = 0
    output_dir: str = 'out'
    data: DataConfig = field(default_factory=DataConfig)
    synthetic: SyntheticConfig = field(default_factory=SyntheticConfig)
    model: ModelConfig = field(default_factory=ModelConfig)
    train: TrainConfig = field(default_factory=TrainConfig)
    imtpp: ImtppConfig = field(default_factory=ImtppConfig)
    transfer: TransferConfig = field(default_factory=TransferConfig)
    hawkes: HawkesConfig = field(default_factory=HawkesConfig)
    forecast: ForecastConfig = field(default_factory=ForecastConfig)

    def __post_init__(self):
        task = TASK_ALIASES.get(self.task, self.task)
        if task not in TASKS:
            raise ConfigError(f"unknown task {self.task!r}; expected one of {TASKS}", key='task')
        object.__setattr__(self, 'task', task)
        if not isinstance(self.seed, int) or isinstance(self.seed, bool) or self.seed < 0:
            raise ConfigError(f"seed must be a non-negative integer, got {self.seed!r}", key='seed')
        if self.train.seed != self.seed:
            object.__setattr__(self, 'train', replace(self.train, seed=self.seed))
        if self.transfer.seed != self.seed:
            object.__setattr__(self, 'transfer', replace(self.transfer, seed=self.seed))


def _tuples(value):
    if isinstance(value, list):
        return tuple(_tuples(item) for item in value)
    return value


def _resolve(path: Optional[str], base_dir: Path, key: str, must_exist: bool = True) -> Optional[str]:
    if path is None:
        return None
    resolved = Path(path)
    if not resolved.is_absolute():
        resolved = base_dir / resolved
    if must_exist and not resolved.exists():
        raise ConfigError(f"path {str(resolved)!r} does not exist", key=key)
    return str(resolved)


def _build_section(name: str, cls, data) -> Any:
    if not isinstance(data, dict):
        raise ConfigError(f"section must be an object, got {type(data).__name__}", key=name)
    allowed = {f.name for f in dataclasses.fields(cls)}
    for key in data:
        if key not in allowed:
            raise ConfigError(f"unknown key {name}.{key}", key=f'{name}.{key}')
    values = {key: value if key == 'params' else _tuples(value) for key, value in data.items()}
    if name == 'train' and 'weights' in values:
        weights = values['weights']
        if not isinstance(weights, dict):
            raise ConfigError("weights must be an object", key='train.weights')
        for key in weights:
            if key not in ('mark', 'time', 'dist'):
                raise ConfigError(f"unknown key train.weights.{key}", key=f'train.weights.{key}')
        values['weights'] = LossWeights(**weights)
    try:
        return cls(**values)
    except ConfigError:
        raise
    except (TypeError, ValueError) as e:
        raise ConfigError(f"invalid {name} section: {e}", key=name) from e


def config_from_dict(raw: dict, base_dir='.') -> ExperimentConfig:
    """Validate a parsed config and resolve its paths against `base_dir`.

    Raises:
        ConfigError: On an unknown key, a bad value or a missing path
    """
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    base_dir = Path(base_dir)
    top = {'task', 'seed', 'output_dir'}
    for key in raw:
        if key not in top and key not in SECTIONS:
            raise ConfigError(f"unknown key {key}", key=key)
    if 'task' not in raw:
        raise ConfigError("missing required key task", key='task')
    sections = {name: _build_section(name, cls, raw[name]) for name, cls in SECTIONS.items() if name in raw}

    data = sections.get('data', DataConfig())
    sections['data'] = replace(data, path=_resolve(data.path, base_dir, 'data.path'),
                               checkpoint=_resolve(data.checkpoint, base_dir, 'data.checkpoint'))
    transfer = sections.get('transfer', TransferConfig())
    sections['transfer'] = replace(transfer, source=_resolve(transfer.source, base_dir, 'transfer.source'),
                                   target=_resolve(transfer.target, base_dir, 'transfer.target'))
    output_dir = _resolve(raw.get('output_dir', 'out'), base_dir, 'output_dir', must_exist=False)
    return ExperimentConfig(task=raw['task'], seed=raw.get('seed', 0), output_dir=output_dir, **sections)


def load_config(path) -> ExperimentConfig:
    """Read and validate an experiment file.

    Raises:
        ConfigError: If the file is not valid JSON or fails validation
        FileNotFoundError: If the file does not exist
    """
    path = Path(path)
    text = path.read_text(encoding='utf-8')
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"{path}: invalid JSON at line {e.lineno}: {e.msg}") from e
    config = config_from_dict(raw, path.parent)
    logger.debug("loaded %s config from %s", config.task, path)
    return config


def apply_overrides(config: ExperimentConfig, seed: Optional[int] = None, output_dir: Optional[str] = None,
                    source: Optional[str] = None, target: Optional[str] = None,
                    freeze: Optional[str] = None, lr_multiplier: Optional[float] = None) -> ExperimentConfig:
    """Apply command-line overrides; override paths are relative to the working directory."""
    changes = {}
    if seed is not None:
        changes['seed'] = seed
    if output_dir is not None:
        changes['output_dir'] = output_dir
    transfer = {}
    if source is not None:
        transfer['source'] = _resolve(source, Path('.'), 'transfer.source')
    if target is not None:
        transfer['target'] = _resolve(target, Path('.'), 'transfer.target')
    if freeze is not None:
        transfer['freeze'] = freeze
    if lr_multiplier is not None:
        transfer['lr_multiplier'] = lr_multiplier
    if transfer:
        changes['transfer'] = replace(config.transfer, **transfer)
    return replace(config, **changes) if changes else config
