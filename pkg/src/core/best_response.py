import logging
from typing import Dict, List, Optional, Sequence, Tuple
import numpy as np
from scipy.linalg import solveh_banded
from src.config.constants import TIE_TOL, SUPPORT_MERGE_FACTOR
from src.core.arcs import Arc, TimeGrid
from src.core.costs import FrozenCost
from src.core.coupling_skeleton import CouplingSkeleton
from src.core.domain_skeleton import DomainSkeleton
from src.core.lagrangian_skeleton import LagrangianSkeleton
from src.core.measures import ArcMeasure, SpatialMeasure, flow as measure_flow
from src.exceptions import InfeasibleStartError, TubeExceededError, NotConvergedError
from src.models.scenario import BestResponseConfig
from src.utils.parallel import parallel_map

logger = logging.getLogger(__name__)

STALL_ITERATIONS = 5


class BestResponseResult:
    def __init__(self, arc: Arc, value: float, converged: bool, iterations: int, gradient_norm: float,
                 ties: List[Arc], start_values: List[float], objective_trace: List[float]):
        self.arc = arc
        self.value = value
        self.converged = converged
        self.iterations = iterations
        self.gradient_norm = gradient_norm
        self.ties = ties
        self.start_values = start_values
        self.objective_trace = objective_trace

    def dict(self) -> Dict[str, object]:
        return {
            'value': self.value,
            'converged': self.converged,
            'iterations': self.iterations,
            'gradient_norm': self.gradient_norm,
            'ties': len(self.ties),
            'start_values': self.start_values,
        }


class _Descent:
    def __init__(self, nodes: np.ndarray, value: float, converged: bool, iterations: int,
                 gradient_norm: float, trace: List[float]):
        self.nodes = nodes
        self.value = value
        self.converged = converged
        self.iterations = iterations
        self.gradient_norm = gradient_norm
        self.trace = trace


class BestResponseSolver:
    """Minimizes the discrete J over arcs from x that stay in the closure.

    Projected gradient descent on nodes 1..N (node 0 pinned), preconditioned by the discrete
    time Laplacian, with Armijo backtracking and node-wise projection after every trial step.
    """

    def __init__(self, domain: DomainSkeleton, config: Optional[BestResponseConfig] = None,
                 curvature: float = 1.0):
        self.domain = domain
        self.config = config or BestResponseConfig()
        self.curvature = curvature
        self.feasibility_tol = self.config.feasibility_tol or domain.feasibility_tol
        self.active_tol = 1e-6 * domain.diameter
        self.distinct_tol = SUPPORT_MERGE_FACTOR * domain.diameter
        self._banded: Dict[Tuple[float, int], np.ndarray] = {}

    @classmethod
    def for_lagrangian(cls, domain: DomainSkeleton, lagrangian: LagrangianSkeleton,
                       config: Optional[BestResponseConfig] = None) -> 'BestResponseSolver':
        return cls(domain, config, curvature=lagrangian.velocity_curvature())

    def _preconditioner(self, grid: TimeGrid) -> np.ndarray:
        key = (grid.dt, grid.steps)
        if key not in self._banded:
            c, dt, n = self.curvature, grid.dt, grid.steps
            ab = np.zeros((2, n))
            ab[0, 1:] = -c / dt
            ab[1, :] = 2.0 * c / dt + dt
            ab[1, -1] = c / dt + dt
            self._banded[key] = ab
        return self._banded[key]

    def _project(self, nodes: np.ndarray) -> np.ndarray:
        return self.domain.project_many(nodes)

    def projected_gradient(self, nodes: np.ndarray, grad: np.ndarray) -> np.ndarray:
        """Gradient on nodes 1..N with the outward-blocked normal part removed at boundary nodes."""
        pg = grad[1:].copy()
        mask, normals = self.domain.boundary_activity(nodes[1:], self.active_tol)
        if np.any(mask):
            sub = pg[mask]
            dots = np.sum(sub * normals, axis=1)
            blocked = dots < 0.0
            sub[blocked] -= dots[blocked, None] * normals[blocked]
            pg[mask] = sub
        return pg

    def _line_search(self, cost: FrozenCost, nodes: np.ndarray, value: float, grad: np.ndarray,
                     direction: np.ndarray, step: float) -> Optional[Tuple[np.ndarray, float, float]]:
        cfg = self.config
        for _ in range(cfg.max_backtracks):
            trial = nodes.copy()
            try:
                trial[1:] = self._project(nodes[1:] + step * direction)
            except TubeExceededError:
                step *= cfg.backtrack_factor
                continue
            trial_value = cost.value(trial)
            decrease = float(np.sum(grad[1:] * (trial[1:] - nodes[1:])))
            if trial_value < value and trial_value <= value + cfg.armijo * min(decrease, 0.0):
                return trial, trial_value, step
            step *= cfg.backtrack_factor
        return None

    def descend(self, x: np.ndarray, initial: np.ndarray, cost: FrozenCost) -> _Descent:
        cfg = self.config
        nodes = np.array(initial, dtype=float)
        nodes[0] = x
        nodes[1:] = self._project(nodes[1:])
        value, grad = cost.value_and_gradient(nodes)
        ab = self._preconditioner(cost.grid)
        trace = [value]
        step, plain_step = 1.0, 1.0
        gradient_norm = np.inf
        converged = False
        stalled = 0
        iterations = 0
        for iterations in range(1, cfg.max_iters + 1):
            pg = self.projected_gradient(nodes, grad)
            gradient_norm = float(np.linalg.norm(pg))
            if gradient_norm <= cfg.gradient_tol:
                converged = True
                break
            direction = -solveh_banded(ab, pg)
            found = self._line_search(cost, nodes, value, grad, direction, min(cfg.max_step, 2.0 * step))
            if found is not None:
                nodes_new, value_new, step = found
            else:
                scale = 1.0 / max(gradient_norm, 1e-300)
                found = self._line_search(cost, nodes, value, grad, -pg,
                                          min(cfg.max_step, 2.0 * plain_step * scale))
                if found is None:
                    logger.debug(f"Line search stalled at iteration {iterations}, |pg|={gradient_norm:.3g}")
                    break
                nodes_new, value_new, plain_step = found
                plain_step /= scale
            improvement = value - value_new
            nodes = nodes_new
            value, grad = cost.value_and_gradient(nodes)
            trace.append(value)
            stalled = stalled + 1 if improvement <= 1e-15 * max(1.0, abs(value)) else 0
            if stalled >= STALL_ITERATIONS:
                gradient_norm = float(np.linalg.norm(self.projected_gradient(nodes, grad)))
                converged = gradient_norm <= cfg.gradient_tol
                break
        else:
            gradient_norm = float(np.linalg.norm(self.projected_gradient(nodes, grad)))
            converged = gradient_norm <= cfg.gradient_tol
        return _Descent(nodes, value, converged, iterations, gradient_norm, trace)

    def initial_guesses(self, x: np.ndarray, grid: TimeGrid, rng: np.random.Generator,
                        count: int) -> List[np.ndarray]:
        """Constant arc, straight line to a sampled point, then random walks around x."""
        guesses = [Arc.constant(grid, x).nodes.copy()]
        if count >= 2:
            target = self.domain.sample_closure(1, rng)[0]
            line = Arc.straight(grid, x, target).nodes.copy()
            try:
                guesses.append(self._project(line))
            except TubeExceededError:
                logger.debug("Straight-line start leaves the tube; skipped")
        scale = self.config.perturbation_scale * self.domain.diameter
        for _ in range(max(0, count - 2)):
            increments = rng.normal(size=(grid.steps, self.domain.dim)) * np.sqrt(grid.dt / grid.horizon)
            walk = np.vstack([np.zeros((1, self.domain.dim)), np.cumsum(increments, axis=0)])
            for _ in range(10):
                try:
                    guesses.append(self._project(x + scale * walk))
                    break
                except TubeExceededError:
                    walk *= 0.5
        return guesses

    def solve(self, x, cost: FrozenCost, rng: Optional[np.random.Generator] = None,
              warm_starts: Optional[Sequence[np.ndarray]] = None, multistart_count: Optional[int] = None,
              strict: bool = False) -> BestResponseResult:
        x = self.domain.check_point(x)
        violation = self.domain.signed_distance(x)
        if violation > self.feasibility_tol:
            raise InfeasibleStartError(f"Start {x.tolist()} lies outside the domain (b = {violation:.3g})")
        rng = rng if rng is not None else np.random.default_rng(0)
        count = multistart_count or self.config.multistart_count
        starts = [np.array(w, dtype=float) for w in (warm_starts or [])]
        starts += self.initial_guesses(x, cost.grid, rng, count)
        runs = [self.descend(x, start, cost) for start in starts]
        best = min(range(len(runs)), key=lambda i: runs[i].value)
        winner = runs[best]
        ties = []
        for i, run in enumerate(runs):
            if i == best or run.value > winner.value + TIE_TOL:
                continue
            if np.max(np.linalg.norm(run.nodes - winner.nodes, axis=1)) <= self.distinct_tol:
                continue
            if all(np.max(np.linalg.norm(run.nodes - t.nodes, axis=1)) > self.distinct_tol for t in ties):
                ties.append(Arc(cost.grid, run.nodes))
        result = BestResponseResult(
            arc=Arc(cost.grid, winner.nodes), value=winner.value, converged=winner.converged,
            iterations=sum(run.iterations for run in runs), gradient_norm=winner.gradient_norm, ties=ties,
            start_values=[run.value for run in runs], objective_trace=winner.trace,
        )
        if not result.converged:
            logger.debug(f"Best response from {x.tolist()} not converged: |pg|={result.gradient_norm:.3g}")
            if strict:
                raise NotConvergedError(f"Best response from {x.tolist()} did not reach the gradient tolerance",
                                        result=result)
        return result


def solve_best_responses(solver: BestResponseSolver, cost: FrozenCost, starts: np.ndarray,
                         warm_starts: Sequence[Sequence[np.ndarray]], seed: int, tag: int,
                         multistart_count: Optional[int] = None,
                         num_threads: Optional[int] = None) -> List[BestResponseResult]:
    """One best response per start point; task j draws from default_rng([seed, tag, j])."""
    def task(j: int) -> BestResponseResult:
        rng = np.random.default_rng([seed, tag, j])
        return solver.solve(starts[j], cost, rng=rng, warm_starts=warm_starts[j], multistart_count=multistart_count)

    return parallel_map(task, range(len(starts)), num_threads)


def best_response(x, flow: Sequence[SpatialMeasure], lagrangian: LagrangianSkeleton, running: CouplingSkeleton,
                  terminal: CouplingSkeleton, domain: DomainSkeleton, grid: TimeGrid,
                  config: Optional[BestResponseConfig] = None, seed: int = 0) -> BestResponseResult:
    cost = FrozenCost.from_flow(grid, flow, lagrangian, running, terminal)
    solver = BestResponseSolver.for_lagrangian(domain, lagrangian, config)
    return solver.solve(x, cost, rng=np.random.default_rng(seed))


class ExploitabilityResult:
    def __init__(self, value: float, gaps: np.ndarray, support_costs: np.ndarray, best_values: np.ndarray,
                 start_groups: np.ndarray, results: List[BestResponseResult]):
        self.value = value
        self.gaps = gaps
        self.support_costs = support_costs
        self.best_values = best_values
        self.start_groups = start_groups
        self.results = results
        self.not_converged = [j for j, r in enumerate(results) if not r.converged]

    @property
    def flagged(self) -> bool:
        return bool(self.not_converged)


def group_starts(eta: ArcMeasure) -> Tuple[np.ndarray, np.ndarray]:
    """Distinct start points of eta and, per atom, the index of its start."""
    lookup: Dict[tuple, int] = {}
    groups = []
    for start in eta.nodes[:, 0, :].tolist():
        groups.append(lookup.setdefault(tuple(start), len(lookup)))
    points = np.array([list(key) for key in lookup])
    return points, np.array(groups, dtype=int)


def exploitability_against(eta: ArcMeasure, cost: FrozenCost, results: Sequence[BestResponseResult],
                           start_groups: np.ndarray) -> ExploitabilityResult:
    """sum_i w_i (J[gamma_i] - V(gamma_i(0))), V the best of the solver value and the support costs."""
    support_costs = cost.batch_values(eta.nodes)
    best_values = np.array([r.value for r in results], dtype=float)
    for group in range(len(best_values)):
        best_values[group] = min(best_values[group], float(np.min(support_costs[start_groups == group])))
    gaps = support_costs - best_values[start_groups]
    return ExploitabilityResult(float(eta.weights @ gaps), gaps, support_costs, best_values, start_groups,
                                list(results))


def exploitability(eta: ArcMeasure, lagrangian: LagrangianSkeleton, running: CouplingSkeleton,
                   terminal: CouplingSkeleton, domain: DomainSkeleton, config: Optional[BestResponseConfig] = None,
                   seed: int = 0, num_threads: Optional[int] = None, warm_limit: int = 3) -> ExploitabilityResult:
    cost = FrozenCost.from_flow(eta.grid, measure_flow(eta), lagrangian, running, terminal)
    solver = BestResponseSolver.for_lagrangian(domain, lagrangian, config)
    starts, start_groups = group_starts(eta)
    support_costs = cost.batch_values(eta.nodes)
    warm = []
    for group in range(len(starts)):
        members = np.nonzero(start_groups == group)[0]
        ranked = members[np.argsort(support_costs[members], kind='stable')][:warm_limit]
        warm.append([eta.nodes[i] for i in ranked])
    results = solve_best_responses(solver, cost, starts, warm, seed, tag=0, num_threads=num_threads)
    outcome = exploitability_against(eta, cost, results, start_groups)
    if outcome.flagged:
        logger.warning(f"Exploitability: {len(outcome.not_converged)} best responses not converged")
    return outcome
