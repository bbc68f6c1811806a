from typing import Sequence
import numpy as np
from src.core.coupling_skeleton import CouplingSkeleton
from src.core.domain_skeleton import DomainSkeleton
from src.core.measures import SpatialMeasure, kantorovich_d1


class AnchorDistanceCoupling(CouplingSkeleton):
    """scale * d1(m, delta_a) * |x - a|.

    The gap against m1 - m2 equals scale * (d1(m1, delta_a) - d1(m2, delta_a))^2, so the
    coupling is monotone for scale >= 0 but never strictly.
    """
    name = "anchor_distance"

    def __init__(self, domain: DomainSkeleton = None, anchor: Sequence[float] = (0.0, 0.0), scale: float = 1.0):
        super().__init__(domain)
        self.anchor = np.asarray(anchor, dtype=float)
        self.scale = float(scale)
        self.monotone = self.scale >= 0

    def spread(self, measure: SpatialMeasure) -> float:
        return kantorovich_d1(measure, SpatialMeasure.dirac(self.anchor))

    def values(self, points, measure):
        return self.scale * self.spread(measure) * np.linalg.norm(np.atleast_2d(points) - self.anchor, axis=1)

    def gradients(self, points, measure):
        offsets = np.atleast_2d(points) - self.anchor
        norms = np.linalg.norm(offsets, axis=1, keepdims=True)
        unit = np.where(norms > 0, offsets / np.where(norms > 0, norms, 1.0), 0.0)
        return self.scale * self.spread(measure) * unit

    def sup_norm(self, domain, resolution):
        reach = float(np.max(np.linalg.norm(domain.grid_points(resolution) - self.anchor, axis=1)))
        return abs(self.scale) * reach * reach

    def describe(self) -> dict:
        info = super().describe()
        info.update({'anchor': self.anchor.tolist(), 'scale': self.scale})
        return info
