from typing import List, Optional, Sequence
import numpy as np
from src.core.domain_skeleton import DomainSkeleton
from src.core.measures import SpatialMeasure


class SnapshotField:
    """x -> F(x, m) for one frozen measure m."""

    def __init__(self, coupling: 'CouplingSkeleton', measure: SpatialMeasure):
        self.coupling = coupling
        self.measure = measure

    def values(self, points: np.ndarray) -> np.ndarray:
        return self.coupling.values(points, self.measure)

    def gradients(self, points: np.ndarray) -> np.ndarray:
        return self.coupling.gradients(points, self.measure)


class FlowField:
    """F(., m(t_k)) for every node of a flow."""

    def __init__(self, snapshots: Sequence[SnapshotField]):
        self.snapshots = list(snapshots)

    @property
    def size(self) -> int:
        return len(self.snapshots)

    def values_at(self, k: int, points: np.ndarray) -> np.ndarray:
        return self.snapshots[k].values(points)

    def gradients_at(self, k: int, points: np.ndarray) -> np.ndarray:
        return self.snapshots[k].gradients(points)

    def node_values(self, nodes: np.ndarray) -> np.ndarray:
        return np.array([self.values_at(k, nodes[k:k + 1])[0] for k in range(self.size)])

    def node_gradients(self, nodes: np.ndarray) -> np.ndarray:
        return np.concatenate([self.gradients_at(k, nodes[k:k + 1]) for k in range(self.size)])

    def batch_node_values(self, stacked: np.ndarray) -> np.ndarray:
        """stacked has shape (K, size, n); returns F(stacked[i, k], m(t_k)) as (K, size)."""
        return np.stack([self.values_at(k, stacked[:, k, :]) for k in range(self.size)], axis=1)

    def tail(self, start: int) -> 'FlowField':
        return FlowField(self.snapshots[start:])


class CouplingSkeleton:
    """Mean-field cost F(x, m); also used for the terminal cost G."""
    name = "coupling"
    monotone = False
    strictly_monotone = False
    depends_on_measure = True
    smooth = True

    def __init__(self, domain: Optional[DomainSkeleton] = None):
        self.domain = domain
        self.fd_step = domain.fd_step if domain is not None else 1e-5

    def values(self, points: np.ndarray, measure: SpatialMeasure) -> np.ndarray:
        raise NotImplementedError

    def value(self, x, measure: SpatialMeasure) -> float:
        return float(self.values(np.atleast_2d(np.asarray(x, dtype=float)), measure)[0])

    def gradients(self, points: np.ndarray, measure: SpatialMeasure) -> np.ndarray:
        points = np.atleast_2d(np.asarray(points, dtype=float))
        grad = np.zeros_like(points)
        for i in range(points.shape[1]):
            e = np.zeros(points.shape[1])
            e[i] = self.fd_step
            grad[:, i] = (self.values(points + e, measure) - self.values(points - e, measure)) / (2 * self.fd_step)
        return grad

    def prepare(self, measure: SpatialMeasure) -> SnapshotField:
        return SnapshotField(self, measure)

    def flow_field(self, flow: Sequence[SpatialMeasure]) -> FlowField:
        return FlowField([self.prepare(m) for m in flow])

    def probe_measures(self, domain: DomainSkeleton) -> List[SpatialMeasure]:
        coarse = domain.grid_points(8)
        if not self.depends_on_measure or len(coarse) == 0:
            return [SpatialMeasure.dirac(domain.sample_closure(1, np.random.default_rng(0))[0])]
        return [SpatialMeasure.dirac(p) for p in coarse] + [SpatialMeasure.uniform(coarse)]

    def sup_norm(self, domain: DomainSkeleton, resolution: int) -> float:
        """max |F(x, m)| over grid points x and a family of probe measures m."""
        points = domain.grid_points(resolution)
        return float(max(np.max(np.abs(self.values(points, m))) for m in self.probe_measures(domain)))

    def describe(self) -> dict:
        return {
            'name': self.name,
            'monotone': self.monotone,
            'strictly_monotone': self.strictly_monotone,
            'depends_on_measure': self.depends_on_measure,
        }
