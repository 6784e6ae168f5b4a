"""Task runner: builds the operation chain for a task and writes its artifacts."""
import logging
from typing import Callable, Dict

import numpy as np

from ..core.errors import ConfigError, TppflowError
from ..core.event_pack import EventPack
from ..core.ingest import read_dataset
from ..core.synthetic import GENERATORS
from ..contexts.community import CommunityContextData
from ..contexts.hawkes import HawkesContextData
from ..models.hawkes import CommunityAssignment, HawkesParams, block_excitation, simulate_dataset
from ..models.transfer import train_source
from ..operations.split import SplitOperation
from ..operations.write_artifacts import WriteArtifactsConsumer
from .config import ExperimentConfig

logger = logging.getLogger(__name__)


def synthetic_pack(config: ExperimentConfig) -> EventPack:
    section = config.synthetic
    generator = GENERATORS[section.generator]
    try:
        dataset = generator(section.num_sequences, section.length, seed=config.seed, **section.params)
    except TypeError as e:
        raise ConfigError(f"bad parameters for generator {section.generator!r}: {e}",
                          key='synthetic.params') from e
    return EventPack(dataset, source_format='csv')


def load_pack(config: ExperimentConfig, allow_synthetic: bool = True) -> EventPack:
    """The task's input: the data file, else the synthetic generator; deletion applied if configured."""
    if config.data.path is not None:
        pack = EventPack.from_file(config.data.path, config.data.format)
    elif allow_synthetic:
        pack = synthetic_pack(config)
    else:
        raise ConfigError(f"task {config.task!r} needs data.path", key='data.path')
    logger.info("loaded %d sequences with %d events", len(pack.dataset), pack.dataset.num_events)
    if config.data.delete_fraction:
        pack = pack.delete_events(config.data.delete_fraction, config.seed)
    return pack


def _checkpoint(config: ExperimentConfig) -> str:
    if config.data.checkpoint is None:
        raise ConfigError(f"task {config.task!r} needs data.checkpoint", key='data.checkpoint')
    return config.data.checkpoint


def hawkes_truth(config: ExperimentConfig):
    """Generating parameters and, for block configs, ground-truth communities."""
    section = config.hawkes
    if section.mu is not None:
        return HawkesParams(section.mu, section.A, section.beta), None
    if section.block_sizes is None:
        raise ConfigError("simulate-hawkes needs hawkes.mu/A or hawkes.block_sizes", key='hawkes.block_sizes')
    A, labels = block_excitation(section.block_sizes, section.within, section.cross)
    return HawkesParams(np.full(labels.size, section.base_rate), A, section.beta), labels


def _write(pack: EventPack, config: ExperimentConfig, write_events: bool = False) -> None:
    WriteArtifactsConsumer(config.output_dir, config.task, config.seed, write_events)(pack)


def run_simulate(config: ExperimentConfig) -> EventPack:
    pack = synthetic_pack(config)
    _write(pack, config, write_events=True)
    return pack


def _simulated_hawkes_pack(config: ExperimentConfig) -> EventPack:
    params, labels = hawkes_truth(config)
    section = config.hawkes
    dataset = simulate_dataset(params, section.num_sequences, section.horizon, config.seed)
    pack = EventPack(dataset, {'horizon': section.horizon}, source_format='csv')
    pack.add_context(HawkesContextData(params, section.horizon, truth=params))
    if labels is not None:
        pack.add_context(CommunityContextData(CommunityAssignment(labels, int(labels.max()) + 1)))
    return pack


def run_simulate_hawkes(config: ExperimentConfig) -> EventPack:
    pack = _simulated_hawkes_pack(config)
    _write(pack, config, write_events=True)
    return pack


def run_fit(config: ExperimentConfig) -> EventPack:
    pack = (load_pack(config)
            .split(config.data.split, config.seed)
            .fit(config.model, config.train))
    pack = pack.evaluate().forecast(config.forecast.horizon, config.seed)
    _write(pack, config)
    return pack


def run_fit_imtpp(config: ExperimentConfig) -> EventPack:
    pack = (load_pack(config)
            .split(config.data.split, config.seed)
            .fit_imtpp(config.model, config.train, config.imtpp)
            .impute(config.imtpp.samples_per_gap, config.seed))
    pack = pack.evaluate().forecast(config.forecast.horizon, config.seed)
    _write(pack, config)
    return pack


def run_fit_hawkes(config: ExperimentConfig) -> EventPack:
    section = config.hawkes
    if config.data.path is not None:
        pack = EventPack.from_file(config.data.path, config.data.format, horizon=section.horizon)
        truth = None
    else:
        pack = _simulated_hawkes_pack(config)
        truth_context = pack.get_context('community')
        truth = truth_context.assignment.labels if truth_context is not None else None
        pack.remove_context('community')
    pack = pack.fit_hawkes(section.beta, section.horizon, fit_config=section.fit_config(config.seed),
                           truth=pack.get_context('hawkes').truth if pack.has_context('hawkes') else None)
    if section.K is not None:
        pack = pack.assign_communities(section.K, config.seed, truth)
    _write(pack, config)
    return pack


def run_transfer(config: ExperimentConfig) -> EventPack:
    transfer = config.transfer
    if transfer.source is None:
        raise ConfigError("transfer needs a source dataset", key='transfer.source')
    if transfer.target is None:
        raise ConfigError("transfer needs a target dataset", key='transfer.target')
    source_split = SplitOperation(config.data.split, config.seed)(EventPack(read_dataset(transfer.source)))
    split = source_split.get_context('split')
    source_model, source_trace = train_source(split.train, config.model, config.train, split.validation)

    pack = EventPack.from_file(transfer.target).split(config.data.split, config.seed)
    pack = pack.fine_tune(source_model, transfer, config.train, source_trace, compare_scratch=True)
    pack = pack.evaluate().forecast(config.forecast.horizon, config.seed)
    _write(pack, config)
    return pack


def run_impute(config: ExperimentConfig) -> EventPack:
    pack = load_pack(config, allow_synthetic=False).load_model(_checkpoint(config))
    pack = pack.impute(config.imtpp.samples_per_gap, config.seed).evaluate()
    _write(pack, config)
    return pack


def run_forecast(config: ExperimentConfig) -> EventPack:
    pack = load_pack(config, allow_synthetic=False).load_model(_checkpoint(config))
    pack = pack.forecast(config.forecast.horizon, config.seed)
    _write(pack, config)
    return pack


def run_evaluate(config: ExperimentConfig) -> EventPack:
    pack = load_pack(config, allow_synthetic=False).load_model(_checkpoint(config)).evaluate()
    _write(pack, config)
    return pack


TASK_RUNNERS: Dict[str, Callable[[ExperimentConfig], EventPack]] = {
    'simulate': run_simulate,
    'simulate-hawkes': run_simulate_hawkes,
    'fit': run_fit,
    'fit-imtpp': run_fit_imtpp,
    'fit-hawkes': run_fit_hawkes,
    'transfer': run_transfer,
    'impute': run_impute,
    'forecast': run_forecast,
    'evaluate': run_evaluate,
}


def run(config: ExperimentConfig) -> int:
    """Execute the configured task end to end.

    Returns:
        0 on success, 1 after logging the error otherwise
    """
    logger.info("running task %s with seed %d into %s", config.task, config.seed, config.output_dir)
    try:
        TASK_RUNNERS[config.task](config)
    except (TppflowError, OSError, ValueError) as e:
        key = getattr(e, 'key', None)
        suffix = f" (config key {key})" if key else ""
        logger.error("task %s failed: %s%s", config.task, e, suffix)
        return 1
    logger.info("task %s finished", config.task)
    return 0
