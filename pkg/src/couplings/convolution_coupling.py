import numpy as np
from scipy.spatial.distance import cdist
from scipy.special import gamma
from src.core.coupling_skeleton import CouplingSkeleton, FlowField, SnapshotField
from src.core.domain_skeleton import DomainSkeleton
from src.core.measures import SpatialMeasure

PROFILES = ('linear', 'exp')


def wendland_normalization(dim: int, bandwidth: float) -> float:
    """c with c * int (1-q)^4 (4q+1) over the ball of radius bandwidth equal to 1."""
    def beta_moment(k: int) -> float:
        return gamma(k + 1) * gamma(5) / gamma(k + 6)

    sphere_area = 2.0 * np.pi ** (dim / 2.0) / gamma(dim / 2.0)
    radial = 4.0 * beta_moment(dim) + beta_moment(dim - 1)
    return float(1.0 / (sphere_area * bandwidth ** dim * radial))


class ConvolutionCoupling(CouplingSkeleton):
    """F(x, m) = int f((phi * m)(y)) phi(x - y) dy with a compactly supported Wendland kernel phi.

    The y-integral is a midpoint rule on the cells of a uniform grid whose centers lie in the
    closure; phi * m is an exact finite sum. For increasing f the coupling is strictly monotone.
    """
    name = "convolution"
    monotone = True
    strictly_monotone = True

    def __init__(self, domain: DomainSkeleton, bandwidth: float = 0.4, profile: str = 'linear',
                 strength: float = 1.0, saturation: float = 1.0, quadrature_resolution: int = 48):
        super().__init__(domain)
        if bandwidth <= 0:
            raise ValueError(f"Kernel bandwidth must be positive, got {bandwidth}")
        if profile not in PROFILES:
            raise ValueError(f"Unknown profile {profile!r}; expected one of {PROFILES}")
        if strength <= 0 or saturation <= 0:
            raise ValueError("Profile strength and saturation must be positive")
        self.bandwidth = float(bandwidth)
        self.profile = profile
        self.strength = float(strength)
        self.saturation = float(saturation)
        self.normalization = wendland_normalization(domain.dim, self.bandwidth)
        lower, upper = domain.bounding_box
        cell = (upper - lower) / quadrature_resolution
        axes = [lo + (np.arange(quadrature_resolution) + 0.5) * h for lo, h in zip(lower, cell)]
        centers = np.stack(np.meshgrid(*axes, indexing='ij'), axis=-1).reshape(-1, domain.dim)
        self.nodes = centers[domain.signed_distance_many(centers) <= 0.0]
        self.cell_volume = float(np.prod(cell))

    def kernel(self, distances: np.ndarray) -> np.ndarray:
        q = np.minimum(distances / self.bandwidth, 1.0)
        return self.normalization * (1.0 - q) ** 4 * (4.0 * q + 1.0)

    def kernel_gradient_factor(self, distances: np.ndarray) -> np.ndarray:
        """grad phi(u) = factor(|u|) * u."""
        q = np.minimum(distances / self.bandwidth, 1.0)
        return -20.0 * self.normalization * (1.0 - q) ** 3 / self.bandwidth ** 2

    def profile_values(self, z: np.ndarray) -> np.ndarray:
        if self.profile == 'linear':
            return self.strength * z
        return self.strength * np.expm1(z / self.saturation)

    def density(self, measure: SpatialMeasure) -> np.ndarray:
        return self.kernel(cdist(self.nodes, measure.points)) @ measure.weights

    def amplitudes(self, measure: SpatialMeasure) -> np.ndarray:
        return self.cell_volume * self.profile_values(self.density(measure))

    def field_values(self, points: np.ndarray, amplitudes: np.ndarray) -> np.ndarray:
        return self.kernel(cdist(np.atleast_2d(points), self.nodes)) @ amplitudes

    def field_gradients(self, points: np.ndarray, amplitudes: np.ndarray) -> np.ndarray:
        points = np.atleast_2d(points)
        offsets = points[:, None, :] - self.nodes[None, :, :]
        factor = self.kernel_gradient_factor(np.linalg.norm(offsets, axis=2)) * amplitudes[None, :]
        return np.einsum('pq,pqn->pn', factor, offsets)

    def values(self, points, measure):
        return self.field_values(points, self.amplitudes(measure))

    def gradients(self, points, measure):
        return self.field_gradients(points, self.amplitudes(measure))

    def prepare(self, measure: SpatialMeasure) -> 'ConvolutionField':
        return ConvolutionField(self, measure)

    def flow_field(self, flow) -> 'ConvolutionFlowField':
        return ConvolutionFlowField(self, np.stack([self.amplitudes(m) for m in flow]))

    def sup_norm(self, domain: DomainSkeleton, resolution: int) -> float:
        # rho = phi * m never exceeds phi(0), and f is increasing with f(0) = 0.
        points = domain.grid_points(resolution)
        mass = self.kernel(cdist(points, self.nodes)).sum(axis=1) * self.cell_volume
        return float(np.max(mass) * abs(self.profile_values(np.array(self.normalization))))

    def describe(self) -> dict:
        info = super().describe()
        info.update({'bandwidth': self.bandwidth, 'profile': self.profile, 'strength': self.strength,
                     'quadrature_nodes': int(len(self.nodes))})
        return info


class ConvolutionField(SnapshotField):
    def __init__(self, coupling: ConvolutionCoupling, measure: SpatialMeasure):
        super().__init__(coupling, measure)
        self.amplitudes = coupling.amplitudes(measure)

    def values(self, points):
        return self.coupling.field_values(points, self.amplitudes)

    def gradients(self, points):
        return self.coupling.field_gradients(points, self.amplitudes)


class ConvolutionFlowField(FlowField):
    """All snapshots share the quadrature nodes; only the amplitudes change with t."""

    def __init__(self, coupling: ConvolutionCoupling, amplitudes: np.ndarray):
        self.coupling = coupling
        self.amplitudes = amplitudes

    @property
    def size(self) -> int:
        return len(self.amplitudes)

    def values_at(self, k, points):
        return self.coupling.field_values(points, self.amplitudes[k])

    def gradients_at(self, k, points):
        return self.coupling.field_gradients(points, self.amplitudes[k])

    def node_values(self, nodes):
        distances = np.linalg.norm(nodes[:, None, :] - self.coupling.nodes[None, :, :], axis=2)
        return np.sum(self.coupling.kernel(distances) * self.amplitudes, axis=1)

    def node_gradients(self, nodes):
        offsets = nodes[:, None, :] - self.coupling.nodes[None, :, :]
        factor = self.coupling.kernel_gradient_factor(np.linalg.norm(offsets, axis=2)) * self.amplitudes
        return np.einsum('kq,kqn->kn', factor, offsets)

    def batch_node_values(self, stacked):
        return np.stack([self.values_at(k, stacked[:, k, :]) for k in range(self.size)], axis=1)

    def tail(self, start):
        return ConvolutionFlowField(self.coupling, self.amplitudes[start:])
