import logging
from typing import Dict, List, Optional, Sequence, Tuple
import numpy as np
from scipy.optimize import linprog
from scipy.sparse import coo_matrix, vstack
from scipy.spatial import cKDTree
from scipy.spatial.distance import cdist
from src.config.constants import MEASURE_WEIGHT_TOL, SPATIAL_MERGE_TOL, PLAN_MARGINAL_TOL
from src.core.arcs import Arc, TimeGrid
from src.exceptions import InvalidMeasureError, MarginalMismatchError, GridMismatchError

logger = logging.getLogger(__name__)


def _cluster_labels(points: np.ndarray, tol: float) -> np.ndarray:
    """Connected components of the 'closer than tol' graph, labelled by first occurrence."""
    labels = np.arange(len(points))
    if len(points) < 2:
        return labels
    pairs = cKDTree(points).query_pairs(tol, output_type='ndarray')
    if len(pairs) == 0:
        return labels

    def find(i):
        while labels[i] != i:
            labels[i] = labels[labels[i]]
            i = labels[i]
        return i

    for i, j in pairs:
        ri, rj = find(i), find(j)
        if ri != rj:
            labels[max(ri, rj)] = min(ri, rj)
    return np.array([find(i) for i in range(len(points))])


class SpatialMeasure:
    """Finitely supported probability measure: atoms (points[i], weights[i])."""

    def __init__(self, points, weights, check: bool = True):
        points = np.array(points, dtype=float)
        weights = np.array(weights, dtype=float)
        if points.ndim == 1:
            points = points[None, :]
        if len(points) == 0:
            raise InvalidMeasureError("Measure has no atoms")
        if weights.shape != (len(points),):
            raise InvalidMeasureError(f"Got {len(points)} points but weights of shape {weights.shape}")
        if check:
            if np.any(~np.isfinite(points)) or np.any(~np.isfinite(weights)):
                raise InvalidMeasureError("Measure has non-finite entries")
            if np.any(weights <= 0):
                raise InvalidMeasureError("Measure weights must be positive")
            if abs(weights.sum() - 1.0) > MEASURE_WEIGHT_TOL:
                raise InvalidMeasureError(f"Measure weights sum to {weights.sum():.15g}, expected 1")
        points.setflags(write=False)
        weights.setflags(write=False)
        self.points = points
        self.weights = weights

    @classmethod
    def dirac(cls, x) -> 'SpatialMeasure':
        return cls(np.asarray(x, dtype=float)[None, :], [1.0])

    @classmethod
    def uniform(cls, points) -> 'SpatialMeasure':
        points = np.asarray(points, dtype=float)
        return cls(points, np.full(len(points), 1.0 / len(points)))

    @property
    def size(self) -> int:
        return len(self.weights)

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def merged(self, tol: float = SPATIAL_MERGE_TOL) -> 'SpatialMeasure':
        labels = _cluster_labels(self.points, tol)
        roots, inverse = np.unique(labels, return_inverse=True)
        if len(roots) == self.size:
            return self
        weights = np.bincount(inverse, weights=self.weights)
        return SpatialMeasure(self.points[roots], weights, check=False)

    def is_feasible(self, domain, tol: Optional[float] = None) -> bool:
        tol = domain.feasibility_tol if tol is None else tol
        return bool(np.all(domain.signed_distance_many(self.points) <= tol))

    def mean(self) -> np.ndarray:
        return self.weights @ self.points

    def same_as(self, other: 'SpatialMeasure') -> bool:
        return (self.points.shape == other.points.shape and np.array_equal(self.points, other.points)
                and np.array_equal(self.weights, other.weights))

    def __repr__(self) -> str:
        return f"SpatialMeasure(atoms={self.size}, dim={self.dim})"


class TransportPlan:
    def __init__(self, source: SpatialMeasure, target: SpatialMeasure, coupling: np.ndarray, cost: float):
        self.source = source
        self.target = target
        self.coupling = coupling
        self.cost = cost

    def marginal_error(self) -> float:
        rows = np.abs(self.coupling.sum(axis=1) - self.source.weights).max()
        cols = np.abs(self.coupling.sum(axis=0) - self.target.weights).max()
        return float(max(rows, cols))

    def is_valid(self, tol: float = PLAN_MARGINAL_TOL) -> bool:
        return bool(np.all(self.coupling >= -tol) and self.marginal_error() <= tol)


def _transport_lp(source: SpatialMeasure, target: SpatialMeasure, cost: np.ndarray) -> np.ndarray:
    m, n = cost.shape
    rows = np.repeat(np.arange(m), n)
    cols = np.arange(m * n)
    row_sums = coo_matrix((np.ones(m * n), (rows, cols)), shape=(m, m * n))
    col_rows = np.tile(np.arange(n), m)
    col_sums = coo_matrix((np.ones(m * n), (col_rows, cols)), shape=(n, m * n))
    # One column constraint is implied by total mass; dropping it keeps the system full rank.
    a_eq = vstack([row_sums, col_sums.tocsr()[:-1]]).tocsr()
    b_eq = np.concatenate([source.weights, target.weights[:-1]])
    result = linprog(cost.reshape(-1), A_eq=a_eq, b_eq=b_eq, bounds=(0, None), method='highs-ds')
    if result.status != 0:
        raise InvalidMeasureError(f"Transport LP failed: {result.message}")
    return np.clip(result.x.reshape(m, n), 0.0, None)


def _check_pair(m1: SpatialMeasure, m2: SpatialMeasure) -> None:
    if m1.size == 0 or m2.size == 0:
        raise InvalidMeasureError("Cannot compare empty measures")
    if m1.dim != m2.dim:
        raise InvalidMeasureError(f"Measures live in different dimensions: {m1.dim} and {m2.dim}")


def optimal_plan(m1: SpatialMeasure, m2: SpatialMeasure, p: int = 1) -> TransportPlan:
    _check_pair(m1, m2)
    if p not in (1, 2):
        raise ValueError(f"Only p = 1 and p = 2 are supported, got {p}")
    cost = cdist(m1.points, m2.points) ** p
    if m1.size == 1 or m2.size == 1:
        coupling = np.outer(m1.weights, m2.weights)
    else:
        coupling = _transport_lp(m1, m2, cost)
    value = float(np.sum(coupling * cost))
    return TransportPlan(m1, m2, coupling, value if p == 1 else float(np.sqrt(max(value, 0.0))))


def kantorovich_d1(m1: SpatialMeasure, m2: SpatialMeasure, p: int = 1) -> float:
    _check_pair(m1, m2)
    if m1 is m2 or m1.same_as(m2):
        return 0.0
    return optimal_plan(m1, m2, p).cost


def kantorovich_dual(m1: SpatialMeasure, m2: SpatialMeasure) -> Tuple[float, np.ndarray, np.ndarray]:
    """Best 1-Lipschitz potential on the union support: max sum f (m1 - m2) s.t. f(a) - f(b) <= |a - b|.

    Returns (value, support points, potential values).
    """
    _check_pair(m1, m2)
    support = np.concatenate([m1.points, m2.points])
    labels = _cluster_labels(support, SPATIAL_MERGE_TOL)
    roots, inverse = np.unique(labels, return_inverse=True)
    points = support[roots]
    signed = np.bincount(inverse, weights=np.concatenate([m1.weights, -m2.weights]), minlength=len(roots))
    k = len(points)
    if k == 1:
        return 0.0, points, np.zeros(1)
    a_idx, b_idx = np.nonzero(~np.eye(k, dtype=bool))
    distances = cdist(points, points)[a_idx, b_idx]
    count = len(a_idx)
    a_ub = coo_matrix((np.concatenate([np.ones(count), -np.ones(count)]),
                       (np.concatenate([np.arange(count), np.arange(count)]), np.concatenate([a_idx, b_idx]))),
                      shape=(count, k)).tocsr()
    # Potentials are defined up to a constant; pin the first one.
    bounds = [(0.0, 0.0)] + [(None, None)] * (k - 1)
    result = linprog(-signed, A_ub=a_ub, b_ub=distances, bounds=bounds, method='highs-ds')
    if result.status != 0:
        raise InvalidMeasureError(f"Dual transport LP failed: {result.message}")
    return float(signed @ result.x), points, result.x


class ArcMeasure:
    """Finitely supported probability measure on arcs sharing one time grid.

    Atom i is the arc nodes[i] with weight weights[i]; every arc starts at an atom of
    initial_marginal, and e_0 pushes the measure forward onto initial_marginal.
    """

    def __init__(self, grid: TimeGrid, nodes, weights, initial_marginal: SpatialMeasure, check: bool = True):
        nodes = np.array(nodes, dtype=float)
        weights = np.array(weights, dtype=float)
        if nodes.ndim != 3 or nodes.shape[1] != grid.size:
            raise GridMismatchError(f"Arc nodes of shape {nodes.shape} do not match {grid!r}")
        if weights.shape != (nodes.shape[0],):
            raise InvalidMeasureError(f"Got {nodes.shape[0]} arcs but weights of shape {weights.shape}")
        nodes.setflags(write=False)
        weights.setflags(write=False)
        self.grid = grid
        self.nodes = nodes
        self.weights = weights
        self.initial_marginal = initial_marginal
        if check:
            self.validate()

    @classmethod
    def from_arcs(cls, arcs: Sequence[Arc], weights, initial_marginal: SpatialMeasure,
                  check: bool = True) -> 'ArcMeasure':
        if not arcs:
            raise InvalidMeasureError("Arc measure has no atoms")
        grid = arcs[0].grid
        for arc in arcs:
            if arc.grid != grid:
                raise GridMismatchError("All arcs of a measure must share one time grid")
        return cls(grid, np.stack([arc.nodes for arc in arcs]), weights, initial_marginal, check=check)

    @classmethod
    def constant(cls, initial_marginal: SpatialMeasure, grid: TimeGrid) -> 'ArcMeasure':
        nodes = np.repeat(initial_marginal.points[:, None, :], grid.size, axis=1)
        return cls(grid, nodes, initial_marginal.weights, initial_marginal)

    @property
    def size(self) -> int:
        return len(self.weights)

    @property
    def dim(self) -> int:
        return self.nodes.shape[2]

    @property
    def arcs(self) -> List[Arc]:
        return [Arc(self.grid, nodes) for nodes in self.nodes]

    def arc(self, index: int) -> Arc:
        return Arc(self.grid, self.nodes[index])

    def start_indices(self) -> np.ndarray:
        """Index of the initial-marginal atom each arc starts from; -1 when it starts elsewhere."""
        lookup = {tuple(p): i for i, p in enumerate(self.initial_marginal.points.tolist())}
        return np.array([lookup.get(tuple(s), -1) for s in self.nodes[:, 0, :].tolist()], dtype=int)

    def marginal_deviation(self) -> float:
        starts = self.start_indices()
        if np.any(starts < 0):
            return float('inf')
        grouped = np.bincount(starts, weights=self.weights, minlength=self.initial_marginal.size)
        return float(np.max(np.abs(grouped - self.initial_marginal.weights)))

    def validate(self) -> None:
        if np.any(~np.isfinite(self.nodes)):
            raise InvalidMeasureError("Arc measure has non-finite nodes")
        if np.any(self.weights <= 0):
            raise InvalidMeasureError("Arc measure weights must be positive")
        if abs(self.weights.sum() - 1.0) > MEASURE_WEIGHT_TOL:
            raise InvalidMeasureError(f"Arc measure weights sum to {self.weights.sum():.15g}, expected 1")
        deviation = self.marginal_deviation()
        if deviation > MEASURE_WEIGHT_TOL:
            raise MarginalMismatchError(f"Initial marginal violated by {deviation:.3g}")

    def energies(self) -> np.ndarray:
        increments = np.diff(self.nodes, axis=1)
        return np.sqrt(np.sum(increments ** 2, axis=(1, 2)) / self.grid.dt)

    def merged(self, tol: float) -> 'ArcMeasure':
        """Merge arcs from the same start whose nodes stay within tol; the earlier arc is kept."""
        if self.size < 2:
            return self
        starts = self.start_indices()
        keep: List[int] = []
        weights: List[float] = []
        representatives: Dict[int, List[int]] = {}
        for i in range(self.size):
            target = None
            for slot in representatives.get(starts[i], []):
                if np.max(np.linalg.norm(self.nodes[keep[slot]] - self.nodes[i], axis=1)) <= tol:
                    target = slot
                    break
            if target is None:
                representatives.setdefault(starts[i], []).append(len(keep))
                keep.append(i)
                weights.append(self.weights[i])
            else:
                weights[target] += self.weights[i]
        if len(keep) == self.size:
            return self
        return ArcMeasure(self.grid, self.nodes[keep], weights, self.initial_marginal, check=False)

    def mix(self, other: 'ArcMeasure', alpha: float, merge_tol: float = 0.0) -> 'ArcMeasure':
        """(1 - alpha) * self + alpha * other."""
        if not 0.0 < alpha <= 1.0:
            raise ValueError(f"Mixing weight must lie in (0, 1], got {alpha}")
        if other.grid != self.grid:
            raise GridMismatchError("Cannot mix arc measures on different time grids")
        if alpha == 1.0:
            mixed = ArcMeasure(other.grid, other.nodes, other.weights, self.initial_marginal, check=False)
        else:
            nodes = np.concatenate([self.nodes, other.nodes])
            weights = np.concatenate([(1.0 - alpha) * self.weights, alpha * other.weights])
            mixed = ArcMeasure(self.grid, nodes, weights, self.initial_marginal, check=False)
        return mixed.merged(merge_tol) if merge_tol > 0 else mixed

    def to_dict(self) -> dict:
        return {
            'grid': self.grid.to_dict(),
            'dim': self.dim,
            'initial_marginal': {
                'points': self.initial_marginal.points.tolist(),
                'weights': self.initial_marginal.weights.tolist(),
            },
            'atoms': [
                {'weight': float(w), 'nodes': nodes.reshape(-1).tolist()}
                for nodes, w in zip(self.nodes, self.weights)
            ],
        }

    @classmethod
    def from_dict(cls, data: dict, check: bool = True) -> 'ArcMeasure':
        grid = TimeGrid.from_dict(data['grid'])
        dim = int(data['dim'])
        marginal = SpatialMeasure(data['initial_marginal']['points'], data['initial_marginal']['weights'],
                                  check=check)
        nodes = np.array([np.asarray(a['nodes'], dtype=float).reshape(grid.size, dim) for a in data['atoms']])
        weights = [a['weight'] for a in data['atoms']]
        return cls(grid, nodes, weights, marginal, check=check)

    def __repr__(self) -> str:
        return f"ArcMeasure(atoms={self.size}, {self.grid!r})"


def pushforward(eta: ArcMeasure, t: float, merge_tol: float = SPATIAL_MERGE_TOL) -> SpatialMeasure:
    t = eta.grid.check_time(t)
    if t == 0.0:
        return eta.initial_marginal
    k = eta.grid.node_index(t)
    if k >= 0:
        points = eta.nodes[:, k, :]
    else:
        k = min(int(t // eta.grid.dt), eta.grid.steps - 1)
        weight = (t - eta.grid.times[k]) / eta.grid.dt
        points = (1.0 - weight) * eta.nodes[:, k, :] + weight * eta.nodes[:, k + 1, :]
    return SpatialMeasure(points, eta.weights, check=False).merged(merge_tol)


def flow(eta: ArcMeasure, merge_tol: float = SPATIAL_MERGE_TOL) -> List[SpatialMeasure]:
    """Snapshots m(t_k) at every grid node."""
    snapshots = [eta.initial_marginal]
    for k in range(1, eta.grid.size):
        snapshots.append(SpatialMeasure(eta.nodes[:, k, :], eta.weights, check=False).merged(merge_tol))
    return snapshots


def disintegrate(eta: ArcMeasure) -> Dict[Tuple[float, ...], ArcMeasure]:
    groups: Dict[Tuple[float, ...], List[int]] = {}
    for i, start in enumerate(eta.nodes[:, 0, :].tolist()):
        groups.setdefault(tuple(start), []).append(i)
    parts = {}
    for start, indices in groups.items():
        weights = eta.weights[indices]
        parts[start] = ArcMeasure(eta.grid, eta.nodes[indices], weights / weights.sum(),
                                  SpatialMeasure.dirac(np.array(start)), check=False)
    return parts


def reassemble(parts: Dict[Tuple[float, ...], ArcMeasure], initial_marginal: SpatialMeasure) -> ArcMeasure:
    lookup = {tuple(p): w for p, w in zip(initial_marginal.points.tolist(), initial_marginal.weights)}
    nodes, weights = [], []
    grid = None
    for start, part in parts.items():
        if start not in lookup:
            raise MarginalMismatchError(f"Conditional measure at {list(start)} has no initial atom")
        grid = part.grid
        nodes.append(part.nodes)
        weights.append(lookup[start] * part.weights)
    return ArcMeasure(grid, np.concatenate(nodes), np.concatenate(weights), initial_marginal, check=False)
