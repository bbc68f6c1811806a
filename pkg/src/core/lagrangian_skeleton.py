from typing import Dict, Optional
import numpy as np


class LagrangianSkeleton:
    """Running cost L(x, v), vectorized over rows of (M, n) arrays.

    Declared constants: C bounds the gradients, c1 and c0 give the coercivity L >= c1|v|^2 - c0.
    Nonsmooth Lagrangians set smooth = False and return a subgradient selection.
    """
    name = "lagrangian"
    smooth = True
    fd_step = 1e-6

    def __init__(self, growth: Optional[float] = None, coercivity: Optional[float] = None,
                 offset: Optional[float] = None):
        defaults = self.default_constants()
        self.growth = float(defaults['C'] if growth is None else growth)
        self.coercivity = float(defaults['c1'] if coercivity is None else coercivity)
        self.offset = float(defaults['c0'] if offset is None else offset)

    def default_constants(self) -> Dict[str, float]:
        return {'C': 1.0, 'c1': 1.0, 'c0': 0.0}

    @property
    def constants(self) -> Dict[str, float]:
        return {'C': self.growth, 'c1': self.coercivity, 'c0': self.offset}

    def velocity_curvature(self) -> float:
        """Typical second derivative in v; scales the optimizer's preconditioner."""
        return 1.0

    def values(self, x: np.ndarray, v: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def value(self, x, v) -> float:
        return float(self.values(np.atleast_2d(np.asarray(x, dtype=float)),
                                 np.atleast_2d(np.asarray(v, dtype=float)))[0])

    def _central_difference(self, x: np.ndarray, v: np.ndarray, wrt_velocity: bool) -> np.ndarray:
        grad = np.zeros_like(x if not wrt_velocity else v)
        for i in range(grad.shape[1]):
            e = np.zeros(grad.shape[1])
            e[i] = self.fd_step
            if wrt_velocity:
                grad[:, i] = (self.values(x, v + e) - self.values(x, v - e)) / (2 * self.fd_step)
            else:
                grad[:, i] = (self.values(x + e, v) - self.values(x - e, v)) / (2 * self.fd_step)
        return grad

    def grad_x(self, x: np.ndarray, v: np.ndarray) -> np.ndarray:
        return self._central_difference(x, v, wrt_velocity=False)

    def grad_v(self, x: np.ndarray, v: np.ndarray) -> np.ndarray:
        return self._central_difference(x, v, wrt_velocity=True)

    def describe(self) -> dict:
        return {'name': self.name, 'smooth': self.smooth, **self.constants}
