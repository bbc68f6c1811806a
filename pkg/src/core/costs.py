import logging
from typing import List, Sequence, Tuple
import numpy as np
from src.config.constants import ASSUMPTION_SLACK_TOL, SUP_NORM_INFLATION
from src.core.arcs import Arc, TimeGrid
from src.core.coupling_skeleton import CouplingSkeleton, FlowField, SnapshotField
from src.core.domain_skeleton import DomainSkeleton
from src.core.lagrangian_skeleton import LagrangianSkeleton
from src.core.measures import SpatialMeasure
from src.exceptions import GridMismatchError
from src.models.reports import AssumptionReport, ConditionCheck, SupNorms

logger = logging.getLogger(__name__)


def trapezoid_weights(size: int) -> np.ndarray:
    weights = np.ones(size)
    weights[0] = weights[-1] = 0.5
    return weights


class FrozenCost:
    """Discrete J against a frozen flow.

    J = sum_k dt L((X_k + X_k+1)/2, (X_k+1 - X_k)/dt) + dt sum_k w_k F(X_k, m_k) + G(X_N, m_N)
    with trapezoid weights w.
    """

    def __init__(self, grid: TimeGrid, lagrangian: LagrangianSkeleton, running: FlowField,
                 terminal: SnapshotField):
        if running.size != grid.size:
            raise GridMismatchError(f"Flow has {running.size} snapshots, grid has {grid.size} nodes")
        self.grid = grid
        self.lagrangian = lagrangian
        self.running = running
        self.terminal = terminal
        self.quadrature = grid.dt * trapezoid_weights(grid.size)

    @classmethod
    def from_flow(cls, grid: TimeGrid, flow: Sequence[SpatialMeasure], lagrangian: LagrangianSkeleton,
                  running: CouplingSkeleton, terminal: CouplingSkeleton) -> 'FrozenCost':
        if len(flow) != grid.size:
            raise GridMismatchError(f"Flow has {len(flow)} snapshots, grid has {grid.size} nodes")
        return cls(grid, lagrangian, running.flow_field(flow), terminal.prepare(flow[-1]))

    def _check_nodes(self, nodes: np.ndarray) -> np.ndarray:
        nodes = np.asarray(nodes, dtype=float)
        if nodes.shape[0] != self.grid.size:
            raise GridMismatchError(f"Arc has {nodes.shape[0]} nodes, cost expects {self.grid.size}")
        return nodes

    def components(self, nodes) -> Tuple[float, float, float]:
        nodes = self._check_nodes(nodes)
        dt = self.grid.dt
        velocities = np.diff(nodes, axis=0) / dt
        midpoints = 0.5 * (nodes[:-1] + nodes[1:])
        kinetic = dt * float(np.sum(self.lagrangian.values(midpoints, velocities)))
        running = float(self.quadrature @ self.running.node_values(nodes))
        terminal = float(self.terminal.values(nodes[-1:])[0])
        return kinetic, running, terminal

    def value(self, nodes) -> float:
        return float(sum(self.components(nodes)))

    def value_and_gradient(self, nodes) -> Tuple[float, np.ndarray]:
        nodes = self._check_nodes(nodes)
        dt = self.grid.dt
        velocities = np.diff(nodes, axis=0) / dt
        midpoints = 0.5 * (nodes[:-1] + nodes[1:])
        kinetic = dt * float(np.sum(self.lagrangian.values(midpoints, velocities)))
        gx = self.lagrangian.grad_x(midpoints, velocities)
        gv = self.lagrangian.grad_v(midpoints, velocities)
        grad = np.zeros_like(nodes)
        grad[:-1] += 0.5 * dt * gx - gv
        grad[1:] += 0.5 * dt * gx + gv
        running = float(self.quadrature @ self.running.node_values(nodes))
        grad += self.quadrature[:, None] * self.running.node_gradients(nodes)
        terminal = float(self.terminal.values(nodes[-1:])[0])
        grad[-1] += self.terminal.gradients(nodes[-1:])[0]
        return kinetic + running + terminal, grad

    def batch_values(self, stacked: np.ndarray) -> np.ndarray:
        """Costs of K arcs given as an array of shape (K, N+1, n)."""
        stacked = np.asarray(stacked, dtype=float)
        count, size, dim = stacked.shape
        if size != self.grid.size:
            raise GridMismatchError(f"Arcs have {size} nodes, cost expects {self.grid.size}")
        dt = self.grid.dt
        velocities = (np.diff(stacked, axis=1) / dt).reshape(-1, dim)
        midpoints = (0.5 * (stacked[:, :-1] + stacked[:, 1:])).reshape(-1, dim)
        kinetic = dt * self.lagrangian.values(midpoints, velocities).reshape(count, -1).sum(axis=1)
        running = self.running.batch_node_values(stacked) @ self.quadrature
        terminal = self.terminal.values(stacked[:, -1, :])
        return kinetic + running + terminal

    def constant_arc_value(self, x) -> float:
        return self.value(np.repeat(np.asarray(x, dtype=float)[None, :], self.grid.size, axis=0))

    def tail(self, start: int) -> 'FrozenCost':
        """Cost of the truncated problem on [t_start, T]."""
        return FrozenCost(self.grid.tail(start), self.lagrangian, self.running.tail(start), self.terminal)

    def step_costs(self, k: int, sources: np.ndarray, targets: np.ndarray) -> np.ndarray:
        """One-step cost from sources at t_k to targets at t_k+1, as a (P, Q) matrix.

        Uses half of the trapezoid weight at each end so that one-step costs add up to J.
        """
        dt = self.grid.dt
        p, q = len(sources), len(targets)
        starts = np.repeat(sources, q, axis=0)
        ends = np.tile(targets, (p, 1))
        kinetic = dt * self.lagrangian.values(0.5 * (starts + ends), (ends - starts) / dt).reshape(p, q)
        f_start = self.running.values_at(k, sources)
        f_end = self.running.values_at(k + 1, targets)
        return kinetic + 0.5 * dt * (f_start[:, None] + f_end[None, :])


def total_cost(arc: Arc, flow: Sequence[SpatialMeasure], lagrangian: LagrangianSkeleton,
               running: CouplingSkeleton, terminal: CouplingSkeleton) -> float:
    return FrozenCost.from_flow(arc.grid, flow, lagrangian, running, terminal).value(arc.nodes)


def _inflate(value: float) -> float:
    return value + SUP_NORM_INFLATION * abs(value)


def estimate_sup_norms(lagrangian: LagrangianSkeleton, running: CouplingSkeleton, terminal: CouplingSkeleton,
                       domain: DomainSkeleton, resolution: int = 64) -> SupNorms:
    points = domain.grid_points(resolution)
    at_rest = lagrangian.values(points, np.zeros_like(points))
    return SupNorms(
        max_lagrangian_at_rest=_inflate(float(np.max(at_rest))),
        max_running=_inflate(running.sup_norm(domain, resolution)),
        max_terminal=_inflate(terminal.sup_norm(domain, resolution)),
        resolution=resolution,
    )


def holder_constant_from_bounds(c1: float, c0: float, horizon: float, max_lagrangian_at_rest: float,
                                max_running: float, max_terminal: float) -> float:
    if c1 <= 0:
        raise ValueError(f"Coercivity constant c1 must be positive, got {c1}")
    inner = (horizon * max_lagrangian_at_rest + 2.0 * horizon * max_running + 2.0 * max_terminal
             + horizon * c0)
    return float(np.sqrt(max(inner, 0.0) / c1))


def holder_bound(lagrangian: LagrangianSkeleton, running: CouplingSkeleton, terminal: CouplingSkeleton,
                 horizon: float, domain: DomainSkeleton, resolution: int = 64) -> Tuple[float, SupNorms]:
    norms = estimate_sup_norms(lagrangian, running, terminal, domain, resolution)
    k = holder_constant_from_bounds(lagrangian.coercivity, lagrangian.offset, horizon,
                                    norms.max_lagrangian_at_rest, norms.max_running, norms.max_terminal)
    return k, norms


def holder_constant(lagrangian: LagrangianSkeleton, running: CouplingSkeleton, terminal: CouplingSkeleton,
                    horizon: float, domain: DomainSkeleton, resolution: int = 64) -> float:
    return holder_bound(lagrangian, running, terminal, horizon, domain, resolution)[0]


def _relative_slack(slack: np.ndarray, scale: np.ndarray) -> np.ndarray:
    return slack / np.maximum(1.0, np.abs(scale))


def _sample_velocities(count: int, dim: int, v_max: float, rng: np.random.Generator) -> np.ndarray:
    directions = rng.normal(size=(count, dim))
    directions /= np.linalg.norm(directions, axis=1, keepdims=True)
    radii = v_max * rng.uniform(size=count) ** (1.0 / dim)
    return directions * radii[:, None]


def check_assumptions(lagrangian: LagrangianSkeleton, samples: int, domain: DomainSkeleton,
                      v_max: float = 50.0, seed: int = 0) -> AssumptionReport:
    """Sampled checks of the growth (L1), coercivity (L2) and convexity (L3) conditions.

    Slacks are reported relative to max(1, |bound|); a check fails below -1e-9.
    """
    if samples < 1:
        raise ValueError("check_assumptions needs at least one sample")
    rng = np.random.default_rng(seed)
    dim = domain.dim
    x = domain.sample_closure(samples, rng)
    v = _sample_velocities(samples, dim, v_max, rng)
    # Large speeds expose non-coercive growth that a bounded ball would miss.
    speeds = np.logspace(0, 6, 25)
    x_far = domain.sample_closure(len(speeds), rng)
    v_far = _sample_velocities(len(speeds), dim, 1.0, rng)
    v_far = v_far / np.linalg.norm(v_far, axis=1, keepdims=True) * speeds[:, None]
    xs = np.concatenate([x, x_far])
    vs = np.concatenate([v, v_far])
    speed = np.linalg.norm(vs, axis=1)
    c, c1, c0 = lagrangian.growth, lagrangian.coercivity, lagrangian.offset
    checks: List[ConditionCheck] = []

    def record(name: str, relative: np.ndarray, detail: str) -> None:
        worst = float(np.min(relative))
        checks.append(ConditionCheck(name=name, worst_slack=worst, passed=worst >= -ASSUMPTION_SLACK_TOL,
                                     samples=int(relative.size), detail=detail))

    grad_x = np.linalg.norm(lagrangian.grad_x(xs, vs), axis=1)
    bound = c * (1.0 + speed ** 2)
    record('L1a', _relative_slack(bound - grad_x, bound), "|D_xL| <= C(1+|v|^2)")
    grad_v = np.linalg.norm(lagrangian.grad_v(xs, vs), axis=1)
    bound = c * (1.0 + speed)
    record('L1b', _relative_slack(bound - grad_v, bound), "|D_vL| <= C(1+|v|)")
    values = lagrangian.values(xs, vs)
    bound = c1 * speed ** 2 - c0
    record('L2', _relative_slack(values - bound, np.abs(values) + np.abs(bound)), "L >= c1|v|^2 - c0")
    # Convexity pairs on log-spread scales so kinks at small speeds are sampled too.
    scales = 10.0 ** (-3.0 * rng.uniform(size=(samples, 1)))
    v_pair = _sample_velocities(samples, dim, v_max, rng) * scales
    w_pair = _sample_velocities(samples, dim, v_max, rng) * scales
    mid = lagrangian.values(x, 0.5 * (v_pair + w_pair))
    ends = 0.5 * lagrangian.values(x, v_pair) + 0.5 * lagrangian.values(x, w_pair)
    record('L3', _relative_slack(ends - mid, np.abs(ends)), "L(x,(v+w)/2) <= (L(x,v)+L(x,w))/2")

    if lagrangian.smooth:
        subset = min(samples, 200)
        xg, vg = x[:subset], v[:subset]
        h = 1e-5
        worst = 0.0
        for analytic, wrt_velocity in ((lagrangian.grad_x(xg, vg), False), (lagrangian.grad_v(xg, vg), True)):
            numeric = np.zeros_like(analytic)
            for i in range(dim):
                e = np.zeros(dim)
                e[i] = h
                if wrt_velocity:
                    numeric[:, i] = (lagrangian.values(xg, vg + e) - lagrangian.values(xg, vg - e)) / (2 * h)
                else:
                    numeric[:, i] = (lagrangian.values(xg + e, vg) - lagrangian.values(xg - e, vg)) / (2 * h)
            error = np.linalg.norm(analytic - numeric, axis=1) / (1.0 + np.linalg.norm(analytic, axis=1))
            worst = max(worst, float(np.max(error)))
        checks.append(ConditionCheck(name='gradient', worst_slack=1e-6 - worst, passed=worst <= 1e-6,
                                     samples=subset, detail="relative error against central differences"))
    else:
        checks.append(ConditionCheck(name='gradient', worst_slack=0.0, passed=True, samples=0, skipped=True,
                                     detail="nonsmooth Lagrangian, subgradient selection"))

    passed = all(entry.passed for entry in checks if entry.name in ('L1a', 'L1b', 'L2', 'L3'))
    report = AssumptionReport(lagrangian=lagrangian.name, constants=lagrangian.constants, checks=checks,
                              passed=passed)
    if not passed:
        logger.warning(f"Assumption check failed for {lagrangian.name}: {report.failures()}")
    return report


def monotonicity_gap(coupling: CouplingSkeleton, m1: SpatialMeasure, m2: SpatialMeasure) -> float:
    """Integral of F(., m1) - F(., m2) against m1 - m2."""
    on_first = coupling.values(m1.points, m1) - coupling.values(m1.points, m2)
    on_second = coupling.values(m2.points, m1) - coupling.values(m2.points, m2)
    return float(m1.weights @ on_first - m2.weights @ on_second)


def random_measure(domain: DomainSkeleton, atoms: int, rng: np.random.Generator) -> SpatialMeasure:
    weights = rng.uniform(0.1, 1.0, size=atoms)
    return SpatialMeasure(domain.sample_closure(atoms, rng), weights / weights.sum(), check=False)


def sampled_monotonicity_gaps(coupling: CouplingSkeleton, domain: DomainSkeleton, pairs: int = 20,
                              atoms: int = 5, seed: int = 0) -> np.ndarray:
    rng = np.random.default_rng(seed)
    return np.array([
        monotonicity_gap(coupling, random_measure(domain, atoms, rng), random_measure(domain, atoms, rng))
        for _ in range(pairs)
    ])
