import numpy as np
from src.core.coupling_skeleton import CouplingSkeleton


class ZeroCoupling(CouplingSkeleton):
    name = "zero"
    monotone = True
    depends_on_measure = False

    def values(self, points, measure):
        return np.zeros(len(np.atleast_2d(points)))

    def gradients(self, points, measure):
        return np.zeros_like(np.atleast_2d(np.asarray(points, dtype=float)))

    def sup_norm(self, domain, resolution):
        return 0.0
