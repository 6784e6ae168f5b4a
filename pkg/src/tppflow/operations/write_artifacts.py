import logging
from pathlib import Path

import pandas as pd

from ..core.ingest import write_dataset
from ..core.operation import Consumer
from ..harness.report import build_report, curves_frame, dumps_report

logger = logging.getLogger(__name__)


class WriteArtifactsConsumer(Consumer):
    """
    Write a finished pack's results into an output directory.

    Always writes metrics.json and curves.csv. model.npz, imputed.csv,
    hawkes_params.txt and communities.csv follow the contexts present;
    events.csv is written on request (simulation tasks).
    """

    def __init__(self, output_dir, task='fit', seed=0, write_events=False, metadata=None):
        super().__init__(output_dir=output_dir, task=task, seed=seed, write_events=write_events)
        self.output_dir = Path(output_dir)
        self.task = task
        self.seed = seed
        self.write_events = write_events
        self.metadata = metadata

    def apply(self, pack):
        """Write the artifacts and return the mapping of artifact name to path."""
        self.output_dir.mkdir(parents=True, exist_ok=True)
        written = {}

        report = build_report(pack, self.task, self.seed, self.metadata)
        written['metrics'] = self.output_dir / 'metrics.json'
        written['metrics'].write_text(dumps_report(report), encoding='utf-8')

        written['curves'] = self.output_dir / 'curves.csv'
        curves_frame(pack).to_csv(written['curves'], index=False, lineterminator='\n')

        fit = pack.get_context('fit')
        if fit is not None:
            written['model'] = self.output_dir / 'model.npz'
            fit.model.save(written['model'])
        if self.write_events:
            written['events'] = self.output_dir / 'events.csv'
            write_dataset(pack.dataset, written['events'])
        imputation = pack.get_context('imputation')
        if imputation is not None:
            written['imputed'] = self.output_dir / 'imputed.csv'
            write_dataset(imputation.imputed, written['imputed'])
        hawkes = pack.get_context('hawkes')
        if hawkes is not None:
            written['hawkes_params'] = self.output_dir / 'hawkes_params.txt'
            written['hawkes_params'].write_text(hawkes.params.to_text(), encoding='utf-8')
        community = pack.get_context('community')
        if community is not None:
            written['communities'] = self.output_dir / 'communities.csv'
            frame = pd.DataFrame({'user': list(pack.dataset.vocab)[:community.assignment.labels.size],
                                  'community': community.assignment.labels})
            frame.to_csv(written['communities'], index=False, lineterminator='\n')

        for name, path in written.items():
            logger.info("wrote %s to %s", name, path)
        return written
