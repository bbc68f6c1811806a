from typing import Any, Dict
import numpy as np
from scipy.spatial.distance import pdist
from src.core.domain_skeleton import DomainSkeleton
from src.exceptions import OutOfHorizonError, GridMismatchError, TubeExceededError, InfeasibleStartError


class TimeGrid:
    def __init__(self, horizon: float, steps: int):
        if not horizon > 0:
            raise ValueError(f"Horizon must be positive, got {horizon}")
        if int(steps) != steps or steps < 1:
            raise ValueError(f"Number of time steps must be a positive integer, got {steps}")
        self.horizon = float(horizon)
        self.steps = int(steps)
        self.dt = self.horizon / self.steps
        self.times = np.arange(self.steps + 1) * self.dt
        self.times[-1] = self.horizon

    @property
    def size(self) -> int:
        return self.steps + 1

    def tail(self, start: int) -> 'TimeGrid':
        if not 0 <= start < self.steps:
            raise ValueError(f"Tail start must be in [0, {self.steps}), got {start}")
        return TimeGrid(self.horizon - self.times[start], self.steps - start)

    def check_time(self, t: float) -> float:
        t = float(t)
        if not (0.0 <= t <= self.horizon):
            raise OutOfHorizonError(f"Time {t} outside [0, {self.horizon}]")
        return t

    def node_index(self, t: float) -> int:
        """Index k with t == t_k up to rounding, or -1 when t is not a grid node."""
        ratio = t / self.dt
        k = int(round(ratio))
        return k if abs(ratio - k) <= 1e-12 * max(1.0, ratio) else -1

    def __eq__(self, other) -> bool:
        return isinstance(other, TimeGrid) and self.steps == other.steps and self.horizon == other.horizon

    def __hash__(self) -> int:
        return hash((self.horizon, self.steps))

    def to_dict(self) -> Dict[str, Any]:
        return {'horizon': self.horizon, 'steps': self.steps}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'TimeGrid':
        return cls(data['horizon'], data['steps'])

    def __repr__(self) -> str:
        return f"TimeGrid(horizon={self.horizon}, steps={self.steps})"


class Arc:
    """Piecewise-linear trajectory through nodes gamma(t_k); immutable."""

    def __init__(self, grid: TimeGrid, nodes):
        nodes = np.array(nodes, dtype=float)
        if nodes.ndim != 2 or nodes.shape[0] != grid.size:
            raise GridMismatchError(f"Arc needs {grid.size} nodes, got array of shape {nodes.shape}")
        nodes.setflags(write=False)
        self.grid = grid
        self.nodes = nodes

    @property
    def dim(self) -> int:
        return self.nodes.shape[1]

    @property
    def start(self) -> np.ndarray:
        return self.nodes[0]

    @property
    def end(self) -> np.ndarray:
        return self.nodes[-1]

    @classmethod
    def constant(cls, grid: TimeGrid, x) -> 'Arc':
        return cls(grid, np.repeat(np.asarray(x, dtype=float)[None, :], grid.size, axis=0))

    @classmethod
    def straight(cls, grid: TimeGrid, x, y) -> 'Arc':
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        fractions = (grid.times / grid.horizon)[:, None]
        nodes = x + fractions * (y - x)
        nodes[-1] = y
        return cls(grid, nodes)

    def evaluate(self, t: float) -> np.ndarray:
        t = self.grid.check_time(t)
        k = self.grid.node_index(t)
        if k >= 0:
            return self.nodes[k].copy()
        k = min(int(t // self.grid.dt), self.grid.steps - 1)
        weight = (t - self.grid.times[k]) / self.grid.dt
        return (1.0 - weight) * self.nodes[k] + weight * self.nodes[k + 1]

    def velocities(self) -> np.ndarray:
        return np.diff(self.nodes, axis=0) / self.grid.dt

    def speeds(self) -> np.ndarray:
        return np.linalg.norm(self.velocities(), axis=1)

    def energy_norm(self) -> float:
        increments = np.diff(self.nodes, axis=0)
        return float(np.sqrt(np.sum(increments ** 2) / self.grid.dt))

    def holder_modulus(self) -> float:
        if self.grid.size < 2:
            return 0.0
        spatial = pdist(self.nodes)
        temporal = np.sqrt(pdist(self.grid.times[:, None]))
        return float(np.max(spatial / temporal))

    def max_feasibility_violation(self, domain: DomainSkeleton) -> float:
        return float(np.max(domain.signed_distance_many(self.nodes)))

    def is_feasible(self, domain: DomainSkeleton, tol: float = None) -> bool:
        tol = domain.feasibility_tol if tol is None else tol
        return self.max_feasibility_violation(domain) <= tol

    def sup_distance(self, other: 'Arc') -> float:
        return float(np.max(np.linalg.norm(self.nodes - other.nodes, axis=1)))

    def to_dict(self) -> Dict[str, Any]:
        return {
            'grid': self.grid.to_dict(),
            'dim': self.dim,
            'nodes': self.nodes.reshape(-1).tolist(),
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'Arc':
        grid = TimeGrid.from_dict(data['grid'])
        return cls(grid, np.asarray(data['nodes'], dtype=float).reshape(grid.size, int(data['dim'])))

    def __repr__(self) -> str:
        return f"Arc({self.grid!r}, start={self.start.tolist()}, end={self.end.tolist()})"


def project_arc(domain: DomainSkeleton, arc: Arc, new_start) -> Arc:
    """Translate arc so it starts at new_start, then project every node onto the closure."""
    new_start = domain.check_point(new_start)
    shift = new_start - arc.nodes[0]
    if np.linalg.norm(shift) >= domain.tube_radius:
        raise TubeExceededError(float(np.linalg.norm(shift)), domain.tube_radius)
    if domain.signed_distance(new_start) > domain.feasibility_tol:
        raise InfeasibleStartError(f"New start {new_start.tolist()} lies outside the domain")
    nodes = domain.project_many(arc.nodes + shift)
    nodes[0] = new_start
    return Arc(arc.grid, nodes)
