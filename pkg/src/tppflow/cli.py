"""Command line: `tppflow <task> --config experiment.json [overrides]`."""
import argparse
import logging
import sys
from dataclasses import replace
from typing import List, Optional

from .core.errors import TppflowError
from .harness.config import TASKS, apply_overrides, load_config
from .harness.runner import run

logger = logging.getLogger(__name__)

LOG_FORMAT = '%(asctime)s %(levelname)s %(name)s: %(message)s'


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='tppflow', description='Marked temporal point process experiments.')
    subparsers = parser.add_subparsers(dest='task', required=True)
    for task in TASKS:
        sub = subparsers.add_parser(task, help=f'run the {task} task')
        sub.add_argument('--config', required=True, help='experiment JSON file')
        sub.add_argument('--seed', type=int, help='override the experiment seed')
        sub.add_argument('--out', help='override the output directory')
        sub.add_argument('--verbose', '-v', action='store_true', help='log at DEBUG level')
        if task == 'transfer':
            sub.add_argument('--source', help='source-region event file')
            sub.add_argument('--target', help='target-region event file')
            sub.add_argument('--freeze', help='comma-separated components to freeze')
            sub.add_argument('--lr-mult', type=float, help='fine-tuning learning-rate multiplier')
    return parser


def configure_logging(verbose: bool = False) -> None:
    logging.basicConfig(level=logging.DEBUG if verbose else logging.INFO, format=LOG_FORMAT, force=True)


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(args.verbose)
    try:
        config = load_config(args.config)
        config = apply_overrides(
            config,
            seed=args.seed,
            output_dir=args.out,
            source=getattr(args, 'source', None),
            target=getattr(args, 'target', None),
            freeze=getattr(args, 'freeze', None),
            lr_multiplier=getattr(args, 'lr_mult', None),
        )
    except (TppflowError, OSError, ValueError) as e:
        logger.error("invalid configuration: %s", e)
        return 2
    if config.task != args.task:
        logger.info("config task %r overridden by subcommand %r", config.task, args.task)
        config = replace(config, task=args.task)
    return run(config)


if __name__ == '__main__':
    sys.exit(main())
