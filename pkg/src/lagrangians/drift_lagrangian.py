from typing import Dict
import numpy as np
from src.core.lagrangian_skeleton import LagrangianSkeleton


class DriftLagrangian(LagrangianSkeleton):
    """L(x, v) = s/2 |v|^2 + beta sin(x_1) |v|: speed is cheaper where sin(x_1) < 0.

    Coercive with c1 = s/4, c0 = beta^2/s; convex in v only where beta sin(x_1) >= 0.
    """
    name = "drift"
    smooth = False

    def __init__(self, scale: float = 1.0, beta: float = 0.5, growth=None, coercivity=None, offset=None):
        if scale <= 0:
            raise ValueError(f"Drift Lagrangian needs a positive scale, got {scale}")
        self.scale = float(scale)
        self.beta = float(beta)
        super().__init__(growth, coercivity, offset)

    def default_constants(self) -> Dict[str, float]:
        return {
            'C': max(self.scale, abs(self.beta)) + abs(self.beta),
            'c1': self.scale / 4.0,
            'c0': self.beta ** 2 / self.scale,
        }

    def velocity_curvature(self) -> float:
        return self.scale

    def values(self, x, v):
        speed = np.linalg.norm(v, axis=1)
        return 0.5 * self.scale * speed ** 2 + self.beta * np.sin(x[:, 0]) * speed

    def grad_x(self, x, v):
        grad = np.zeros_like(x)
        grad[:, 0] = self.beta * np.cos(x[:, 0]) * np.linalg.norm(v, axis=1)
        return grad

    def grad_v(self, x, v):
        norms = np.linalg.norm(v, axis=1, keepdims=True)
        unit = np.where(norms > 0, v / np.where(norms > 0, norms, 1.0), 0.0)
        return self.scale * v + self.beta * np.sin(x[:, :1]) * unit
