# Operations module for tppflow pipeline steps
# Import all operations to trigger registration

from . import split
from . import delete_events
from . import fit
from . import fit_imtpp
from . import fine_tune
from . import load_model
from . import evaluate
from . import forecast
from . import impute
from . import fit_hawkes
from . import assign_communities
from .write_artifacts import WriteArtifactsConsumer

# This ensures all operations are registered when the package is imported
