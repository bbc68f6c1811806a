from typing import Dict
import numpy as np
from src.core.lagrangian_skeleton import LagrangianSkeleton


class SpeedLagrangian(LagrangianSkeleton):
    """L(x, v) = s |v|. Convex but only linearly growing, hence not coercive."""
    name = "speed"
    smooth = False

    def __init__(self, scale: float = 1.0, growth=None, coercivity=None, offset=None):
        self.scale = float(scale)
        super().__init__(growth, coercivity, offset)

    def default_constants(self) -> Dict[str, float]:
        return {'C': self.scale, 'c1': 1.0, 'c0': 0.0}

    def values(self, x, v):
        return self.scale * np.linalg.norm(v, axis=1)

    def grad_x(self, x, v):
        return np.zeros_like(x)

    def grad_v(self, x, v):
        norms = np.linalg.norm(v, axis=1, keepdims=True)
        # subgradient 0 at rest
        return np.where(norms > 0, self.scale * v / np.where(norms > 0, norms, 1.0), 0.0)
