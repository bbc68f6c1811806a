from typing import Any, Dict
import numpy as np
from src.domains.levelset_domain import ImplicitFunction, LevelSetDomain


class SuperellipseFunction(ImplicitFunction):
    def __init__(self, a: float = 2.0, b: float = 1.0, power: float = 4.0):
        if power < 2:
            raise ValueError("Superellipse power must be at least 2 for a C2 boundary")
        self.axes = np.array([a, b], dtype=float)
        self.power = float(power)

    def value(self, points):
        return np.sum(np.abs(points / self.axes) ** self.power, axis=1) - 1.0

    def gradient(self, points):
        p = self.power
        return p * np.sign(points) * np.abs(points) ** (p - 1.0) / self.axes ** p

    def hessian(self, x):
        p = self.power
        return np.diag(p * (p - 1.0) * np.abs(x) ** (p - 2.0) / self.axes ** p)

    def parameterize(self, theta: np.ndarray) -> np.ndarray:
        exponent = 2.0 / self.power
        c, s = np.cos(theta), np.sin(theta)
        return np.stack([self.axes[0] * np.sign(c) * np.abs(c) ** exponent,
                         self.axes[1] * np.sign(s) * np.abs(s) ** exponent], axis=1)


class SuperellipseDomain(LevelSetDomain):
    """Axis-aligned |x1/a|^p + |x2/b|^p < 1; Newton seeds come from the polar parameterization."""
    kind = "superellipse"

    def __init__(self, a: float = 2.0, b: float = 1.0, power: float = 4.0, tube_radius: float = 0.2,
                 cloud_resolution: int = 256):
        function = SuperellipseFunction(a, b, power)
        box = np.array([[-a, -b], [a, b]]) * 1.05
        super().__init__(function, box, tube_radius, cloud_resolution=cloud_resolution)
        self.a = float(a)
        self.b = float(b)
        self.power = float(power)

    @classmethod
    def from_params(cls, params: Dict[str, Any], tube_radius: float) -> 'SuperellipseDomain':
        return cls(a=params.get('a', 2.0), b=params.get('b', 1.0), power=params.get('power', 4.0),
                   tube_radius=tube_radius, cloud_resolution=params.get('cloud_resolution', 256))

    def _boundary_cloud(self) -> np.ndarray:
        theta = np.linspace(0.0, 2.0 * np.pi, 8 * self.cloud_resolution, endpoint=False)
        return self._refine_onto_level_set(self.function.parameterize(theta))

    def describe(self) -> dict:
        info = super().describe()
        info.update({'a': self.a, 'b': self.b, 'power': self.power})
        return info
