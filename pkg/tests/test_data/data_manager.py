import shutil
import tempfile
from pathlib import Path
import logging

from tppflow.core.ingest import write_dataset
from tppflow.core.synthetic import alternating, lognormal_renewal, near_periodic

logger = logging.getLogger(__name__)

class TestDataManager:
    """Manages generated event files for tppflow tests.

    Files are written once into a directory under the system temp dir, so
    tests never touch the workspace. Every file comes from a seeded generator
    and is identical across runs.
    """

    __test__ = False

    DEFAULT_EVENT_FILES = {
        'renewal.csv': lambda: lognormal_renewal(20, 12, num_marks=3, seed=11),
        'renewal.jsonl': lambda: lognormal_renewal(20, 12, num_marks=3, seed=11),
        'spatial.csv': lambda: lognormal_renewal(12, 10, num_marks=2, locations=True, seed=5),
        'alternating.csv': lambda: alternating(20, 15, seed=3),
        'periodic.csv': lambda: near_periodic(20, 15, seed=4),
        'target.csv': lambda: lognormal_renewal(12, 10, num_marks=2, seed=21, mark_prefix='t'),
    }

    def __init__(self):
        """Initialize the test data manager."""
        self.data_dir = Path(tempfile.gettempdir()) / 'tppflow_test_data'
        self.data_dir.mkdir(exist_ok=True)
        logger.info(f"Test data directory: {self.data_dir}")

    def get_file_path(self, file_name):
        """Get the path to a test event file, generating it if necessary.

        Args:
            file_name: Name of the test file (e.g., 'renewal.csv')

        Returns:
            Path: Path to the event file
        """
        if file_name not in self.DEFAULT_EVENT_FILES:
            raise ValueError(f"Unknown test file: {file_name}")

        path = self.data_dir / file_name
        if not path.exists():
            logger.info(f"Generating test file: {file_name}")
            write_dataset(self.DEFAULT_EVENT_FILES[file_name](), str(path))
        return path

    def cleanup(self):
        """Remove all generated test data."""
        if self.data_dir.exists():
            shutil.rmtree(self.data_dir)
            logger.info(f"Removed test data directory: {self.data_dir}")

# Singleton instance for easy access
data_manager = TestDataManager()

def get_test_file(file_name):
    """Get the path to a generated test event file.

    Args:
        file_name: Name of the test file (e.g., 'renewal.csv')

    Returns:
        Path: Path to the event file
    """
    return data_manager.get_file_path(file_name)

def cleanup_test_data():
    """Clean up all test data."""
    data_manager.cleanup()
