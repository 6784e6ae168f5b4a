import pytest
import sys
from pathlib import Path

# Add the src directory to the path so we can import the package
src_dir = Path(__file__).parent.parent / 'src'
sys.path.insert(0, str(src_dir))

from tppflow import EventPack
from tppflow.core.events import Dataset, Event, Sequence
from tppflow.core.synthetic import lognormal_renewal
from tppflow.models.mtpp import ModelConfig
from tppflow.models.training import TrainConfig
from tests.test_data.data_manager import get_test_file, cleanup_test_data

@pytest.fixture(scope="session")
def test_files():
    """Fixture that provides paths to generated event files.

    Returns:
        dict: Dictionary mapping file names to their paths
    """
    files = {name: get_test_file(name) for name in (
        'renewal.csv', 'renewal.jsonl', 'spatial.csv', 'alternating.csv', 'periodic.csv', 'target.csv')}
    yield files
    # Clean up test data after all tests are done
    cleanup_test_data()

@pytest.fixture
def renewal_path(test_files):
    """Fixture that provides the path to a three-mark renewal CSV file."""
    return test_files['renewal.csv']

@pytest.fixture
def spatial_path(test_files):
    """Fixture that provides the path to a located renewal CSV file."""
    return test_files['spatial.csv']

@pytest.fixture
def small_dataset():
    """Ten three-mark renewal sequences of eight events."""
    return lognormal_renewal(10, 8, num_marks=3, seed=1)

@pytest.fixture
def spatial_dataset():
    """Six located renewal sequences of six events."""
    return lognormal_renewal(6, 6, num_marks=2, locations=True, seed=2)

@pytest.fixture
def five_event_sequence():
    """A hand-written two-mark sequence of five events."""
    events = [Event(0, 0.5), Event(1, 1.2), Event(0, 2.0), Event(1, 3.5), Event(0, 3.9)]
    return Sequence('s', events)

@pytest.fixture
def five_event_dataset(five_event_sequence):
    return Dataset([five_event_sequence], ('a', 'b'))

@pytest.fixture
def tiny_model_config():
    """Small sizes so finite differences stay fast."""
    return ModelConfig(embedding_size=3, input_size=3, hidden_size=4)

@pytest.fixture
def quick_train_config():
    return TrainConfig(epochs=2, batch_size=4, learning_rate=1e-2, seed=0)

@pytest.fixture
def small_pack(small_dataset):
    """Fixture that provides an EventPack over the small dataset."""
    return EventPack(small_dataset, source_format='csv')
