import functools
import logging
from typing import Any, Callable, Dict, Optional, Sequence, Tuple
import numpy as np
from scipy.optimize import root
from scipy.spatial import cKDTree
from src.core.domain_skeleton import DomainSkeleton
from src.config.constants import CLOSEST_POINT_TOL_FACTOR
from src.exceptions import TubeExceededError, UnknownComponentError, ClosestPointError

logger = logging.getLogger(__name__)


class ImplicitFunction:
    """Smooth g with the domain {g < 0}; value and gradient take (M, n) arrays."""

    def value(self, points: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def gradient(self, points: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def hessian(self, x: np.ndarray) -> Optional[np.ndarray]:
        return None


class EllipseFunction(ImplicitFunction):
    def __init__(self, a: float = 2.0, b: float = 1.0, center: Sequence[float] = (0.0, 0.0)):
        self.axes = np.array([a, b], dtype=float)
        self.center = np.asarray(center, dtype=float)

    def value(self, points):
        return np.sum(((points - self.center) / self.axes) ** 2, axis=1) - 1.0

    def gradient(self, points):
        return 2.0 * (points - self.center) / self.axes ** 2

    def hessian(self, x):
        return np.diag(2.0 / self.axes ** 2)

    def bounding_box(self) -> np.ndarray:
        return np.stack([self.center - self.axes, self.center + self.axes])


class CassiniFunction(ImplicitFunction):
    """|x - f1|^2 |x - f2|^2 - b^4 with foci (+-a, 0); a peanut-shaped oval for a < b < sqrt(2) a."""

    def __init__(self, a: float = 1.0, b: float = 1.2):
        if b <= a:
            raise ValueError("Cassini oval needs b > a to be a single smooth curve")
        self.a = float(a)
        self.b = float(b)
        self.foci = np.array([[-a, 0.0], [a, 0.0]])

    def value(self, points):
        p = np.sum((points - self.foci[0]) ** 2, axis=1)
        q = np.sum((points - self.foci[1]) ** 2, axis=1)
        return p * q - self.b ** 4

    def gradient(self, points):
        u = points - self.foci[0]
        w = points - self.foci[1]
        p = np.sum(u ** 2, axis=1)
        q = np.sum(w ** 2, axis=1)
        return 2.0 * u * q[:, None] + 2.0 * w * p[:, None]

    def hessian(self, x):
        u = x - self.foci[0]
        w = x - self.foci[1]
        p = u @ u
        q = w @ w
        return 2.0 * (p + q) * np.eye(2) + 4.0 * (np.outer(u, w) + np.outer(w, u))

    def bounding_box(self) -> np.ndarray:
        reach = np.sqrt(self.a ** 2 + self.b ** 2)
        height = self.b ** 2 / (2.0 * self.a) if self.b < np.sqrt(2.0) * self.a else self.b
        return np.array([[-reach, -height], [reach, height]])


IMPLICIT_FUNCTIONS: Dict[str, Callable[..., ImplicitFunction]] = {
    'ellipse': EllipseFunction,
    'cassini': CassiniFunction,
}


class LevelSetDomain(DomainSkeleton):
    """Domain {g < 0}; b and Db come from the closest boundary point.

    The closest point y of x solves y - x - lam * grad g(y) = 0, g(y) = 0, by Newton
    iteration seeded from the nearest points of a precomputed boundary cloud.
    """
    kind = "levelset"

    def __init__(self, function: ImplicitFunction, bounding_box, tube_radius: float,
                 cloud_resolution: int = 256, seed_count: int = 4, cache_size: int = 16384):
        box = np.asarray(bounding_box, dtype=float)
        super().__init__(box.shape[1], tube_radius, box)
        self.function = function
        self.cloud_resolution = cloud_resolution
        self.seed_count = seed_count
        self.closest_tol = CLOSEST_POINT_TOL_FACTOR * self.diameter
        self.cloud = self._boundary_cloud()
        if len(self.cloud) == 0:
            raise ValueError("Level set has no zero crossing inside the bounding box")
        self.tree = cKDTree(self.cloud)
        self._closest = functools.lru_cache(maxsize=cache_size)(self._closest_point_uncached)
        logger.debug(f"{self.kind} domain: boundary cloud of {len(self.cloud)} points")

    @classmethod
    def from_params(cls, params: Dict[str, Any], tube_radius: float) -> 'LevelSetDomain':
        params = dict(params)
        name = params.pop('function', None)
        if name not in IMPLICIT_FUNCTIONS:
            raise UnknownComponentError(f"Unknown implicit function {name!r}; "
                                        f"available: {sorted(IMPLICIT_FUNCTIONS)}")
        cloud_resolution = params.pop('cloud_resolution', 256)
        margin = params.pop('box_margin', 0.05)
        function = IMPLICIT_FUNCTIONS[name](**params)
        box = function.bounding_box()
        pad = margin * (box[1] - box[0])
        return cls(function, np.stack([box[0] - pad, box[1] + pad]), tube_radius,
                   cloud_resolution=cloud_resolution)

    def _level_set_hessian(self, y: np.ndarray) -> np.ndarray:
        hess = self.function.hessian(y)
        if hess is not None:
            return hess
        h = self.fd_step
        hess = np.zeros((self.dim, self.dim))
        for i in range(self.dim):
            e = np.zeros(self.dim)
            e[i] = h
            hess[:, i] = (self.function.gradient((y + e)[None])[0] - self.function.gradient((y - e)[None])[0]) / (2 * h)
        return 0.5 * (hess + hess.T)

    def _refine_onto_level_set(self, points: np.ndarray, steps: int = 4) -> np.ndarray:
        for _ in range(steps):
            g = self.function.value(points)
            grad = self.function.gradient(points)
            sq = np.maximum(np.sum(grad ** 2, axis=1), 1e-300)
            points = points - (g / sq)[:, None] * grad
        return points

    def _boundary_cloud(self) -> np.ndarray:
        axes = [np.linspace(lo, hi, self.cloud_resolution) for lo, hi in zip(*self.bounding_box)]
        mesh = np.stack(np.meshgrid(*axes, indexing='ij'), axis=-1)
        values = self.function.value(mesh.reshape(-1, self.dim)).reshape(mesh.shape[:-1])
        crossings = []
        for axis in range(self.dim):
            lo = [slice(None)] * self.dim
            hi = [slice(None)] * self.dim
            lo[axis] = slice(None, -1)
            hi[axis] = slice(1, None)
            g0, g1 = values[tuple(lo)], values[tuple(hi)]
            change = np.sign(g0) != np.sign(g1)
            if not np.any(change):
                continue
            t = (g0[change] / (g0[change] - g1[change]))[:, None]
            p0 = mesh[tuple(lo)][change]
            p1 = mesh[tuple(hi)][change]
            crossings.append(p0 + t * (p1 - p0))
        if not crossings:
            return np.zeros((0, self.dim))
        return self._refine_onto_level_set(np.concatenate(crossings))

    def stationarity_residual(self, x: np.ndarray, y: np.ndarray) -> float:
        """max(distance of y to the level set, tangential part of x - y); 0 at a closest point."""
        grad = self.function.gradient(y[None])[0]
        norm = float(np.linalg.norm(grad))
        if norm == 0.0:
            return np.inf
        normal = grad / norm
        offset = x - y
        tangential = offset - np.dot(offset, normal) * normal
        level = abs(float(self.function.value(y[None])[0])) / norm
        return max(level, float(np.linalg.norm(tangential)))

    def _closest_point_uncached(self, key: Tuple[float, ...]) -> Tuple[np.ndarray, float]:
        x = np.array(key)
        k = min(self.seed_count, len(self.cloud))
        cloud_dists, indices = self.tree.query(x, k=k)
        seeds = self.cloud[np.atleast_1d(indices)]
        # cloud points lie on the boundary, so the closest point is at most this far
        bound = float(np.min(cloud_dists)) + self.closest_tol
        best_y, best_dist = None, np.inf
        for seed in seeds:
            y = self._solve_closest(x, seed)
            if y is None:
                continue
            dist = float(np.linalg.norm(y - x))
            if dist < best_dist:
                best_y, best_dist = y, dist
        if best_dist > bound:
            logger.debug(f"Closest-point Newton found no point within {bound:.3g} of {x}; "
                         f"descending along the boundary")
            descended = self._descend_along_boundary(x, seeds[0])
            polished = self._solve_closest(x, descended)
            if polished is None:
                residual = self.stationarity_residual(x, descended)
                if residual > self.closest_tol:
                    raise ClosestPointError(x, residual)
                polished = descended
            dist = float(np.linalg.norm(polished - x))
            if dist < best_dist:
                best_y, best_dist = polished, dist
        return best_y, best_dist

    def _solve_closest(self, x: np.ndarray, seed: np.ndarray) -> Optional[np.ndarray]:
        """Newton on y - x - lam grad g(y) = 0, g(y) = 0; None unless the result is stationary."""
        n = self.dim

        def residual(z):
            y, lam = z[:n], z[n]
            grad = self.function.gradient(y[None])[0]
            return np.concatenate([y - x - lam * grad, [self.function.value(y[None])[0]]])

        def jacobian(z):
            y, lam = z[:n], z[n]
            grad = self.function.gradient(y[None])[0]
            jac = np.zeros((n + 1, n + 1))
            jac[:n, :n] = np.eye(n) - lam * self._level_set_hessian(y)
            jac[:n, n] = -grad
            jac[n, :n] = grad
            return jac

        grad = self.function.gradient(seed[None])[0]
        lam0 = float(np.dot(x - seed, grad) / max(np.dot(grad, grad), 1e-300))
        # hybr often reports failure at machine precision; the residual decides
        solution = root(residual, np.concatenate([seed, [lam0]]), jac=jacobian, method='hybr',
                        options={'xtol': 1e-12})
        y = solution.x[:n]
        if not np.all(np.isfinite(y)):
            return None
        y = self._refine_onto_level_set(y[None], steps=2)[0]
        if self.stationarity_residual(x, y) > self.closest_tol:
            return None
        return y

    def _descend_along_boundary(self, x: np.ndarray, y: np.ndarray, max_steps: int = 500) -> np.ndarray:
        """Damped tangential steps towards x, each pulled back onto the level set."""
        y = self._refine_onto_level_set(y[None], steps=8)[0]
        dist = float(np.linalg.norm(x - y))
        step = 1.0
        for _ in range(max_steps):
            grad = self.function.gradient(y[None])[0]
            normal = grad / np.linalg.norm(grad)
            offset = x - y
            tangential = offset - np.dot(offset, normal) * normal
            if np.linalg.norm(tangential) <= self.closest_tol:
                break
            candidate = self._refine_onto_level_set((y + step * tangential)[None], steps=8)[0]
            candidate_dist = float(np.linalg.norm(x - candidate))
            if candidate_dist < dist:
                y, dist = candidate, candidate_dist
                step = min(1.0, 2.0 * step)
            else:
                step *= 0.5
                if step < 1e-12:
                    break
        return y

    def signed_distance(self, x) -> float:
        x = self.check_point(x)
        g = self.function.value(x[None])[0]
        if g == 0.0:
            return 0.0
        _, dist = self._closest(tuple(x.tolist()))
        return float(np.sign(g) * dist)

    def gradient(self, x) -> np.ndarray:
        x = self.check_point(x)
        y, _ = self._closest(tuple(x.tolist()))
        grad = self.function.gradient(y[None])[0]
        return grad / np.linalg.norm(grad)

    def project_to_closure(self, x) -> np.ndarray:
        x = self.check_point(x)
        if self.function.value(x[None])[0] <= 0.0:
            return x.copy()
        y, dist = self._closest(tuple(x.tolist()))
        if dist >= self.tube_radius:
            raise TubeExceededError(dist, self.tube_radius)
        return y.copy()

    def project_many(self, points) -> np.ndarray:
        points = self.check_points(points)
        out = points.copy()
        outside = np.nonzero(self.function.value(points) > 0.0)[0]
        for i in outside:
            out[i] = self.project_to_closure(points[i])
        return out

    def signed_distance_many(self, points) -> np.ndarray:
        points = self.check_points(points)
        return np.array([self.signed_distance(p) for p in points])

    def boundary_activity(self, points, tol: float):
        points = self.check_points(points)
        g = self.function.value(points)
        grad_norm = np.linalg.norm(self.function.gradient(points), axis=1)
        estimate = g / np.maximum(grad_norm, 1e-300)
        candidates = np.nonzero(estimate >= -max(10.0 * tol, 0.01 * self.tube_radius))[0]
        mask = np.zeros(len(points), dtype=bool)
        for i in candidates:
            mask[i] = self.signed_distance(points[i]) >= -tol
        return mask, self.gradient_many(points[mask])

    def grid_points(self, resolution: int) -> np.ndarray:
        axes = [np.linspace(lo, hi, resolution) for lo, hi in zip(*self.bounding_box)]
        mesh = np.stack(np.meshgrid(*axes, indexing='ij'), axis=-1).reshape(-1, self.dim)
        return mesh[self.function.value(mesh) <= 0.0]

    def sample_closure(self, count: int, rng: np.random.Generator) -> np.ndarray:
        lower, upper = self.bounding_box
        accepted = []
        total = 0
        while total < count:
            batch = rng.uniform(lower, upper, size=(max(2 * count, 16), self.dim))
            keep = batch[self.function.value(batch) <= 0.0]
            accepted.append(keep)
            total += len(keep)
        return np.concatenate(accepted)[:count]

    def describe(self) -> dict:
        info = super().describe()
        info.update({'function': type(self.function).__name__, 'cloud_points': int(len(self.cloud))})
        return info
