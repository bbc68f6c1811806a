from typing import Dict
import numpy as np
from src.core.lagrangian_skeleton import LagrangianSkeleton


class QuadraticLagrangian(LagrangianSkeleton):
    """L(x, v) = s |v|^2."""
    name = "quadratic"

    def __init__(self, scale: float = 0.5, growth=None, coercivity=None, offset=None):
        if scale <= 0:
            raise ValueError(f"Quadratic Lagrangian needs a positive scale, got {scale}")
        self.scale = float(scale)
        super().__init__(growth, coercivity, offset)

    def default_constants(self) -> Dict[str, float]:
        return {'C': 2.0 * self.scale, 'c1': self.scale, 'c0': 0.0}

    def velocity_curvature(self) -> float:
        return 2.0 * self.scale

    def values(self, x, v):
        return self.scale * np.sum(v ** 2, axis=1)

    def grad_x(self, x, v):
        return np.zeros_like(x)

    def grad_v(self, x, v):
        return 2.0 * self.scale * v
