from ..core.context import ContextData


class CommunityContextData(ContextData):
    """Community labels from the shared excitation matrix, with agreement if truth is known."""

    def __init__(self, assignment, agreement=None):
        self.assignment = assignment
        self.agreement = agreement

    def to_dict(self):
        return {
            'K': self.assignment.K,
            'labels': self.assignment.labels.tolist(),
            'sizes': self.assignment.sizes().tolist(),
            'agreement': self.agreement,
        }
