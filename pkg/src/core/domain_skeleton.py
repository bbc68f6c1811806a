from typing import Optional, Sequence, Tuple
import numpy as np
from src.config.constants import FD_STEP_FACTOR, FEASIBILITY_TOL_FACTOR, EIKONAL_TOL
from src.exceptions import InvalidPointError, TubeExceededError


class DomainSkeleton:
    """Closure of a bounded open set with C2 boundary, seen through its oriented distance b.

    b < 0 inside, b = 0 on the boundary, b > 0 outside. Subclasses implement
    signed_distance and gradient; everything else has a generic fallback.
    """
    kind = "domain"

    def __init__(self, dim: int, tube_radius: float, bounding_box: Sequence[Sequence[float]],
                 diameter: Optional[float] = None):
        if dim < 1:
            raise ValueError(f"Domain dimension must be positive, got {dim}")
        if not tube_radius > 0:
            raise ValueError(f"Tube radius must be positive, got {tube_radius}")
        box = np.asarray(bounding_box, dtype=float)
        if box.shape != (2, dim) or np.any(box[1] <= box[0]):
            raise ValueError(f"Bounding box must be [lower, upper] with lower < upper in {dim} dimensions")
        self.dim = dim
        self.tube_radius = float(tube_radius)
        self.bounding_box = box
        self.diameter = float(diameter) if diameter is not None else float(np.linalg.norm(box[1] - box[0]))
        self.fd_step = FD_STEP_FACTOR * self.diameter
        self.feasibility_tol = FEASIBILITY_TOL_FACTOR * self.diameter
        self._projection_lipschitz: Optional[float] = None

    def check_point(self, x) -> np.ndarray:
        point = np.asarray(x, dtype=float)
        if point.shape != (self.dim,):
            raise InvalidPointError(f"Expected a point of dimension {self.dim}, got shape {point.shape}")
        if not np.all(np.isfinite(point)):
            raise InvalidPointError(f"Point has non-finite coordinates: {point}")
        return point

    def check_points(self, points) -> np.ndarray:
        array = np.asarray(points, dtype=float)
        if array.ndim != 2 or array.shape[1] != self.dim:
            raise InvalidPointError(f"Expected points of shape (M, {self.dim}), got {array.shape}")
        if not np.all(np.isfinite(array)):
            raise InvalidPointError("Points have non-finite coordinates")
        return array

    def signed_distance(self, x) -> float:
        raise NotImplementedError

    def gradient(self, x) -> np.ndarray:
        raise NotImplementedError

    def signed_distance_many(self, points) -> np.ndarray:
        points = self.check_points(points)
        return np.array([self.signed_distance(p) for p in points])

    def gradient_many(self, points) -> np.ndarray:
        points = self.check_points(points)
        if len(points) == 0:
            return np.zeros((0, self.dim))
        return np.array([self.gradient(p) for p in points])

    def hessian(self, x) -> np.ndarray:
        x = self.check_point(x)
        h = self.fd_step
        hess = np.zeros((self.dim, self.dim))
        for i in range(self.dim):
            e = np.zeros(self.dim)
            e[i] = h
            hess[:, i] = (self.gradient(x + e) - self.gradient(x - e)) / (2.0 * h)
        return 0.5 * (hess + hess.T)

    def distance(self, x) -> float:
        return max(self.signed_distance(x), 0.0)

    def contains(self, x, tol: Optional[float] = None) -> bool:
        tol = self.feasibility_tol if tol is None else tol
        return self.signed_distance(x) <= tol

    def project_to_closure(self, x) -> np.ndarray:
        x = self.check_point(x)
        b = self.signed_distance(x)
        if b <= 0.0:
            return x.copy()
        if b >= self.tube_radius:
            raise TubeExceededError(b, self.tube_radius)
        return x - b * self.gradient(x)

    def project_many(self, points) -> np.ndarray:
        points = self.check_points(points)
        b = self.signed_distance_many(points)
        out = points.copy()
        outside = b > 0.0
        if not np.any(outside):
            return out
        worst = float(np.max(b))
        if worst >= self.tube_radius:
            raise TubeExceededError(worst, self.tube_radius)
        out[outside] = points[outside] - b[outside, None] * self.gradient_many(points[outside])
        return out

    def boundary_activity(self, points, tol: float) -> Tuple[np.ndarray, np.ndarray]:
        """Mask of points with b >= -tol and the outward normals Db at those points."""
        b = self.signed_distance_many(points)
        mask = b >= -tol
        return mask, self.gradient_many(np.asarray(points, dtype=float)[mask])

    def sample_closure(self, count: int, rng: np.random.Generator) -> np.ndarray:
        lower, upper = self.bounding_box
        accepted = []
        total = 0
        while total < count:
            batch = rng.uniform(lower, upper, size=(max(2 * count, 16), self.dim))
            keep = batch[self.signed_distance_many(batch) <= 0.0]
            accepted.append(keep)
            total += len(keep)
        return np.concatenate(accepted)[:count]

    def sample_tube(self, count: int, rng: np.random.Generator) -> np.ndarray:
        lower = self.bounding_box[0] - self.tube_radius
        upper = self.bounding_box[1] + self.tube_radius
        accepted = []
        total = 0
        while total < count:
            batch = rng.uniform(lower, upper, size=(max(2 * count, 16), self.dim))
            keep = batch[np.abs(self.signed_distance_many(batch)) < self.tube_radius]
            accepted.append(keep)
            total += len(keep)
        return np.concatenate(accepted)[:count]

    def grid_points(self, resolution: int) -> np.ndarray:
        axes = [np.linspace(lo, hi, resolution) for lo, hi in zip(*self.bounding_box)]
        mesh = np.stack(np.meshgrid(*axes, indexing='ij'), axis=-1).reshape(-1, self.dim)
        return mesh[self.signed_distance_many(mesh) <= 0.0]

    def eikonal_deviation(self, samples: int = 500, seed: int = 0) -> float:
        points = self.sample_tube(samples, np.random.default_rng(seed))
        norms = np.linalg.norm(self.gradient_many(points), axis=1)
        return float(np.max(np.abs(norms - 1.0)))

    def validate_tube_radius(self, samples: int = 500, seed: int = 0) -> bool:
        return self.eikonal_deviation(samples, seed) <= EIKONAL_TOL

    def projection_lipschitz(self, samples: int = 400, seed: int = 0) -> float:
        """Sampled Lipschitz constant of x -> x - d(x) Db(x) over the outer tube, at least 1."""
        if self._projection_lipschitz is None:
            rng = np.random.default_rng(seed)
            points = self.sample_tube(samples, rng)
            worst = 1.0
            for x in points:
                b = self.signed_distance(x)
                if b <= 0.0:
                    continue
                g = self.gradient(x)
                jac = np.eye(self.dim) - np.outer(g, g) - b * self.hessian(x)
                worst = max(worst, float(np.linalg.norm(jac, 2)))
            self._projection_lipschitz = worst
        return self._projection_lipschitz

    def describe(self) -> dict:
        return {
            'kind': self.kind,
            'dim': self.dim,
            'tube_radius': self.tube_radius,
            'diameter': self.diameter,
        }
