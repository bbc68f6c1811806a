from typing import Sequence
import numpy as np
from src.core.coupling_skeleton import CouplingSkeleton
from src.core.domain_skeleton import DomainSkeleton


class TargetCoupling(CouplingSkeleton):
    """weight * |y - z*|^2, the same for every measure."""
    name = "target"
    monotone = True
    depends_on_measure = False

    def __init__(self, domain: DomainSkeleton = None, target: Sequence[float] = (0.0, 0.0), weight: float = 1.0):
        super().__init__(domain)
        self.target = np.asarray(target, dtype=float)
        self.weight = float(weight)

    def values(self, points, measure):
        return self.weight * np.sum((np.atleast_2d(points) - self.target) ** 2, axis=1)

    def gradients(self, points, measure):
        return 2.0 * self.weight * (np.atleast_2d(points) - self.target)

    def sup_norm(self, domain, resolution):
        return float(np.max(np.abs(self.values(domain.grid_points(resolution), None))))

    def describe(self) -> dict:
        info = super().describe()
        info.update({'target': self.target.tolist(), 'weight': self.weight})
        return info
