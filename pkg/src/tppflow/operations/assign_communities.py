from ..core.operation import Operation
from ..contexts.community import CommunityContextData
from ..models.hawkes import assign_communities, label_agreement


@CommunityContextData.register_as_producer
@Operation.register
class AssignCommunitiesOperation(Operation):
    """
    Cluster users by their rows and columns of the fitted excitation matrix.
    """

    def __init__(self, K=2, seed=0, truth=None):
        """Initialize community assignment.

        Args:
            K: Number of communities
            seed: K-means seed
            truth: Optional ground-truth labels; enables the agreement score
        """
        super().__init__(K=K, seed=seed)
        self.K = K
        self.seed = seed
        self.truth = truth

    def apply(self, pack):
        hawkes = pack.require_context('hawkes', self.name)
        assignment = assign_communities(hawkes.params.A, self.K, self.seed)
        agreement = None
        if self.truth is not None:
            agreement = label_agreement(assignment.labels, self.truth)
        new_pack = pack.copy()
        new_pack.add_context(CommunityContextData(assignment, agreement))
        return new_pack
