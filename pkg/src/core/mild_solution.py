import logging
from typing import List, Optional, Sequence, Tuple
import numpy as np
import pandas as pd
from src.config import SolverDefaults
from src.config.constants import (MONOTONE_GAP_TOL, INIT_RANDOM, UNIQUENESS_PASSED, UNIQUENESS_FAILED,
                                  UNIQUENESS_SKIPPED_PRECONDITION)
from src.core.arcs import TimeGrid
from src.core.best_response import BestResponseSolver
from src.core.costs import FrozenCost, monotonicity_gap, sampled_monotonicity_gaps, trapezoid_weights
from src.core.coupling_skeleton import CouplingSkeleton
from src.core.domain_skeleton import DomainSkeleton
from src.core.equilibrium import EquilibriumResult, FictitiousPlaySolver
from src.core.lagrangian_skeleton import LagrangianSkeleton
from src.core.measures import SpatialMeasure, flow as measure_flow, kantorovich_d1
from src.core.scenario import Scenario
from src.exceptions import GridMismatchError, ShapeMismatchError, SkippedNotConvergedError
from src.models.reports import UniquenessReport
from src.models.scenario import BestResponseConfig, ValueGridSpec
from src.utils.parallel import parallel_map

logger = logging.getLogger(__name__)


class ValueGrid:
    """u(t_k, x_j) on spatial points in the closure and every time node."""

    def __init__(self, grid: TimeGrid, points: np.ndarray, values: np.ndarray, converged: np.ndarray):
        points = np.atleast_2d(np.asarray(points, dtype=float))
        values = np.asarray(values, dtype=float)
        converged = np.asarray(converged, dtype=bool)
        if values.shape != (grid.size, len(points)) or converged.shape != values.shape:
            raise ShapeMismatchError(f"Values of shape {values.shape} do not match {grid.size} times "
                                     f"x {len(points)} points")
        self.grid = grid
        self.points = points
        self.values = values
        self.converged = converged

    @property
    def flagged(self) -> int:
        return int(np.count_nonzero(~self.converged))

    def sup_difference(self, other: 'ValueGrid') -> float:
        if other.grid != self.grid or other.points.shape != self.points.shape \
                or not np.allclose(other.points, self.points, rtol=0.0, atol=1e-12):
            raise ShapeMismatchError("Value grids differ in time nodes or spatial points")
        return float(np.max(np.abs(self.values - other.values)))

    def to_frame(self) -> pd.DataFrame:
        count, dim = self.points.shape
        frame = pd.DataFrame({
            'k': np.repeat(np.arange(self.grid.size), count),
            't': np.repeat(self.grid.times, count),
        })
        for i in range(dim):
            frame[f'x{i + 1}'] = np.tile(self.points[:, i], self.grid.size)
        frame['u'] = self.values.reshape(-1)
        frame['converged'] = self.converged.reshape(-1)
        return frame

    @classmethod
    def from_frame(cls, frame: pd.DataFrame, grid: TimeGrid) -> 'ValueGrid':
        frame = frame.sort_values(['k'], kind='stable')
        coords = sorted((c for c in frame.columns if c.startswith('x')), key=lambda c: int(c[1:]))
        sizes = frame.groupby('k').size()
        if len(sizes) != grid.size or sizes.nunique() != 1:
            raise ShapeMismatchError(f"Value grid table does not cover {grid.size} time nodes evenly")
        count = int(sizes.iloc[0])
        points = frame[coords].to_numpy()[:count]
        values = frame['u'].to_numpy().reshape(grid.size, count)
        converged = frame['converged'].astype(bool).to_numpy().reshape(grid.size, count)
        return cls(grid, points, values, converged)


def value_function(flow: Sequence[SpatialMeasure], lagrangian: LagrangianSkeleton, running: CouplingSkeleton,
                   terminal: CouplingSkeleton, domain: DomainSkeleton, grid: TimeGrid,
                   spec: Optional[ValueGridSpec] = None, config: Optional[BestResponseConfig] = None,
                   seed: int = 0, points: Optional[np.ndarray] = None,
                   num_threads: Optional[int] = None) -> ValueGrid:
    """Best-response value of the tail problem on [t_k, T] from every grid point.

    Layers run backward; the optimal arc found at (t_k+1, x_j), prefixed with x_j, warm-starts (t_k, x_j).
    """
    spec = spec or ValueGridSpec()
    points = domain.grid_points(spec.resolution) if points is None else domain.check_points(points)
    cost = FrozenCost.from_flow(grid, flow, lagrangian, running, terminal)
    solver = BestResponseSolver.for_lagrangian(domain, lagrangian, config)
    values = np.zeros((grid.size, len(points)))
    converged = np.ones((grid.size, len(points)), dtype=bool)
    values[-1] = cost.terminal.values(points)
    following = [p[None, :] for p in points]
    for k in range(grid.steps - 1, -1, -1):
        tail = cost.tail(k)

        def task(j: int, k=k, tail=tail):
            warm = np.vstack([points[j][None, :], following[j]])
            return solver.solve(points[j], tail, rng=np.random.default_rng([seed, k, j]), warm_starts=[warm],
                                multistart_count=spec.multistart_count)

        results = parallel_map(task, range(len(points)), num_threads)
        for j, result in enumerate(results):
            values[k, j] = result.value
            converged[k, j] = result.converged
            following[j] = result.arc.nodes
        logger.debug(f"Value layer {k}: {int(np.count_nonzero(~converged[k]))} flagged points")
    u = ValueGrid(grid, points, values, converged)
    if u.flagged:
        logger.warning(f"Value function: {u.flagged} of {values.size} cells not converged")
    return u


def dynamic_programming_residual(u: ValueGrid, flow: Sequence[SpatialMeasure], lagrangian: LagrangianSkeleton,
                                 running: CouplingSkeleton, terminal: CouplingSkeleton) -> float:
    """max over k, j of u(t_k, x_j) - min_l [one-step cost(x_j -> x_l) + u(t_k+1, x_l)], clipped at 0."""
    cost = FrozenCost.from_flow(u.grid, flow, lagrangian, running, terminal)
    residual = 0.0
    for k in range(u.grid.steps):
        continuation = cost.step_costs(k, u.points, u.points) + u.values[k + 1][None, :]
        residual = max(residual, float(np.max(u.values[k] - np.min(continuation, axis=1))))
    return residual


def constant_arc_bound(u: ValueGrid, flow: Sequence[SpatialMeasure], lagrangian: LagrangianSkeleton,
                       running: CouplingSkeleton, terminal: CouplingSkeleton) -> np.ndarray:
    """Cost of staying put from (t_k, x_j); u never exceeds it."""
    cost = FrozenCost.from_flow(u.grid, flow, lagrangian, running, terminal)
    bound = np.zeros_like(u.values)
    bound[-1] = cost.terminal.values(u.points)
    for k in range(u.grid.steps):
        tail = cost.tail(k)
        stacked = np.repeat(u.points[:, None, :], tail.grid.size, axis=1)
        bound[k] = tail.batch_values(stacked)
    return bound


def compare_flows(running: CouplingSkeleton, first: Sequence[SpatialMeasure],
                  second: Sequence[SpatialMeasure]) -> Tuple[List[float], List[float]]:
    """Per-time d1 and monotonicity gap of F between two flows."""
    if len(first) != len(second):
        raise GridMismatchError(f"Flows have {len(first)} and {len(second)} snapshots")
    distances = [kantorovich_d1(a, b) for a, b in zip(first, second)]
    gaps = [monotonicity_gap(running, a, b) for a, b in zip(first, second)]
    return distances, gaps


def monotone_precondition(scenario: Scenario) -> Optional[str]:
    """None when F is strictly monotone and G monotone on samples, else the reason."""
    running, terminal = scenario.running, scenario.terminal
    pairs = SolverDefaults.DEFAULT_MONOTONE_PROBE_PAIRS
    if not running.depends_on_measure:
        return f"running coupling {running.name!r} does not depend on the measure, so it is not strictly monotone"
    if not running.strictly_monotone:
        return f"running coupling {running.name!r} is not declared strictly monotone"
    worst = float(np.min(sampled_monotonicity_gaps(running, scenario.domain, pairs, seed=scenario.seed)))
    if worst < -MONOTONE_GAP_TOL:
        return f"running coupling {running.name!r} has a sampled monotonicity gap of {worst:.3g}"
    if not terminal.monotone:
        return f"terminal coupling {terminal.name!r} is not declared monotone"
    worst = float(np.min(sampled_monotonicity_gaps(terminal, scenario.domain, pairs, seed=scenario.seed)))
    if worst < -MONOTONE_GAP_TOL:
        return f"terminal coupling {terminal.name!r} has a sampled monotonicity gap of {worst:.3g}"
    return None


def uniqueness_crosscheck(scenario: Scenario, seeds: Sequence[int], first: Optional[EquilibriumResult] = None,
                          num_threads: Optional[int] = None,
                          u_tol: float = SolverDefaults.DEFAULT_UNIQUENESS_U_TOL,
                          gap_tol: float = SolverDefaults.DEFAULT_UNIQUENESS_GAP_TOL) -> UniquenessReport:
    """Solve from several seeds and compare the value functions and flows.

    The first seed uses the configured initialization, the others start from random arcs.
    `first` reuses an already solved run for seeds[0].
    """
    seeds = list(seeds)
    if len(seeds) < 2:
        raise ValueError("The uniqueness cross-check needs at least two seeds")
    reason = monotone_precondition(scenario)
    if reason is not None:
        logger.warning(f"Uniqueness cross-check skipped: {reason}")
        return UniquenessReport(status=UNIQUENESS_SKIPPED_PRECONDITION, message=reason, seeds=seeds,
                                u_tol=u_tol, gap_tol=gap_tol)
    results: List[EquilibriumResult] = []
    for i, seed in enumerate(seeds):
        if i == 0 and first is not None:
            results.append(first)
            continue
        config = scenario.solver if i == 0 else scenario.solver.model_copy(update={'initialization': INIT_RANDOM})
        results.append(FictitiousPlaySolver(scenario.with_seed(seed), config, num_threads).run())
    failed = [seed for seed, result in zip(seeds, results) if not result.converged]
    if failed:
        raise SkippedNotConvergedError(f"Equilibrium runs for seeds {failed} did not reach the exploitability "
                                       f"tolerance; uniqueness not assessed")
    flows = [measure_flow(result.eta) for result in results]
    grids = [value_function(f, scenario.lagrangian, scenario.running, scenario.terminal, scenario.domain,
                            scenario.grid, scenario.value_grid, scenario.best_response, seed=seed,
                            num_threads=num_threads)
             for f, seed in zip(flows, seeds)]
    size = scenario.grid.size
    u_diff = 0.0
    distances = np.zeros(size)
    gaps = np.zeros(size)
    field_gaps = np.zeros(size)
    terminal_gap = 0.0
    for other_flow, other_grid in zip(flows[1:], grids[1:]):
        u_diff = max(u_diff, grids[0].sup_difference(other_grid))
        d, g = compare_flows(scenario.running, flows[0], other_flow)
        distances = np.maximum(distances, d)
        gaps = np.where(np.abs(g) > np.abs(gaps), g, gaps)
        for k in range(size):
            delta = (scenario.running.values(grids[0].points, flows[0][k])
                     - scenario.running.values(grids[0].points, other_flow[k]))
            field_gaps[k] = max(field_gaps[k], float(np.max(np.abs(delta))))
        gap = monotonicity_gap(scenario.terminal, flows[0][-1], other_flow[-1])
        terminal_gap = gap if abs(gap) > abs(terminal_gap) else terminal_gap
    integral = float(scenario.grid.dt * trapezoid_weights(size) @ gaps)
    passed = u_diff <= u_tol and float(np.max(np.abs(gaps))) <= gap_tol
    report = UniquenessReport(
        status=UNIQUENESS_PASSED if passed else UNIQUENESS_FAILED,
        message="" if passed else "value functions or flows differ beyond tolerance",
        seeds=seeds,
        exploitabilities=[result.exploitability for result in results],
        u_sup_diff=u_diff,
        monotonicity_gaps=gaps.tolist(),
        coupling_gap_integral=integral,
        d1_per_time=distances.tolist(),
        field_gaps=field_gaps.tolist(),
        terminal_gap=terminal_gap,
        u_tol=u_tol,
        gap_tol=gap_tol,
        passed=passed,
    )
    logger.info(f"Uniqueness cross-check {report.status}: |u1-u2|={u_diff:.3g}, "
                f"max gap={float(np.max(np.abs(gaps))):.3g}")
    return report
