from typing import Any, Dict, Sequence
import numpy as np
from src.core.domain_skeleton import DomainSkeleton


class DiscDomain(DomainSkeleton):
    """Euclidean ball; b(x) = |x - c| - r in closed form."""
    kind = "disc"

    def __init__(self, center: Sequence[float] = (0.0, 0.0), radius: float = 1.0, tube_radius: float = 0.5):
        center = np.asarray(center, dtype=float)
        if radius <= 0:
            raise ValueError(f"Disc radius must be positive, got {radius}")
        self.center = center
        self.radius = float(radius)
        box = np.stack([center - radius, center + radius])
        super().__init__(len(center), tube_radius, box, diameter=2.0 * radius)

    @classmethod
    def from_params(cls, params: Dict[str, Any], tube_radius: float) -> 'DiscDomain':
        return cls(center=params.get('center', (0.0, 0.0)), radius=params.get('radius', 1.0),
                   tube_radius=tube_radius)

    def signed_distance(self, x) -> float:
        x = self.check_point(x)
        return float(np.linalg.norm(x - self.center) - self.radius)

    def signed_distance_many(self, points) -> np.ndarray:
        points = self.check_points(points)
        return np.linalg.norm(points - self.center, axis=1) - self.radius

    def gradient(self, x) -> np.ndarray:
        return self.gradient_many(self.check_point(x)[None, :])[0]

    def gradient_many(self, points) -> np.ndarray:
        points = self.check_points(points)
        offset = points - self.center
        norms = np.linalg.norm(offset, axis=1)
        normals = np.zeros_like(offset)
        # Db is undefined at the center; any unit vector keeps |Db| = 1 there.
        at_center = norms == 0.0
        normals[at_center, 0] = 1.0
        normals[~at_center] = offset[~at_center] / norms[~at_center, None]
        return normals

    def hessian(self, x) -> np.ndarray:
        x = self.check_point(x)
        offset = x - self.center
        r = np.linalg.norm(offset)
        if r == 0.0:
            return np.zeros((self.dim, self.dim))
        n = offset / r
        return (np.eye(self.dim) - np.outer(n, n)) / r

    def boundary_activity(self, points, tol: float):
        points = self.check_points(points)
        mask = self.signed_distance_many(points) >= -tol
        return mask, self.gradient_many(points[mask])

    def projection_lipschitz(self, samples: int = 400, seed: int = 0) -> float:
        return 1.0

    def describe(self) -> dict:
        info = super().describe()
        info.update({'center': self.center.tolist(), 'radius': self.radius})
        return info
