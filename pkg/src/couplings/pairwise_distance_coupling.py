import numpy as np
from scipy.spatial.distance import cdist
from src.core.coupling_skeleton import CouplingSkeleton
from src.core.domain_skeleton import DomainSkeleton


class PairwiseDistanceCoupling(CouplingSkeleton):
    """scale * d1(m, delta_x) = scale * sum_i w_i |x - x_i|.

    |x - y| is conditionally negative definite, so the monotonicity gap has the sign of -scale:
    anti-monotone (crowd-seeking in gap terms) for scale > 0, monotone for scale < 0.
    """
    name = "pairwise_distance"

    def __init__(self, domain: DomainSkeleton = None, scale: float = 1.0):
        super().__init__(domain)
        self.scale = float(scale)
        self.monotone = self.scale <= 0

    def values(self, points, measure):
        return self.scale * cdist(np.atleast_2d(points), measure.points) @ measure.weights

    def gradients(self, points, measure):
        offsets = np.atleast_2d(points)[:, None, :] - measure.points[None, :, :]
        norms = np.linalg.norm(offsets, axis=2, keepdims=True)
        unit = np.where(norms > 0, offsets / np.where(norms > 0, norms, 1.0), 0.0)
        return self.scale * np.einsum('m,pmn->pn', measure.weights, unit)

    def sup_norm(self, domain, resolution):
        return abs(self.scale) * domain.diameter

    def describe(self) -> dict:
        info = super().describe()
        info.update({'scale': self.scale})
        return info
