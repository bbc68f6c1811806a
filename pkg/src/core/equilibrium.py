import logging
import time
from typing import List, Optional, Tuple
import numpy as np
from src.config import SolverDefaults
from src.config.constants import (CERTIFICATE_SLACK, HOLDER_PAIR_SLACK, MEASURE_WEIGHT_TOL, SUPPORT_MERGE_FACTOR,
                                  DAMPING_HARMONIC, INIT_RANDOM)
from src.core.arcs import Arc
from src.core.best_response import (BestResponseSolver, BestResponseResult, ExploitabilityResult,
                                    exploitability, exploitability_against, solve_best_responses)
from src.core.costs import FrozenCost, check_assumptions, holder_bound
from src.core.measures import ArcMeasure, flow, kantorovich_d1
from src.core.scenario import Scenario
from src.exceptions import AssumptionViolationError, GridMismatchError, NotConvergedError
from src.models.reports import (EnergyCheck, EquilibriumCertificate, HolderCheck, MarginalCheck, SupNorms,
                                TraceRecord)
from src.models.scenario import SolverConfig

logger = logging.getLogger(__name__)


class EquilibriumResult:
    def __init__(self, eta: ArcMeasure, certificate: EquilibriumCertificate, trace: List[TraceRecord],
                 timings: List[Tuple[int, float]], best_iteration: int):
        self.eta = eta
        self.certificate = certificate
        self.trace = trace
        self.timings = timings
        self.best_iteration = best_iteration

    @property
    def converged(self) -> bool:
        return self.certificate.converged

    @property
    def exploitability(self) -> float:
        return self.certificate.exploitability


def holder_check(eta: ArcMeasure, constant: float) -> HolderCheck:
    """d1(m(t_a), m(t_b)) <= K |t_b - t_a|^(1/2) over all grid pairs.

    The diagonal coupling sum_i w_i |gamma_i(t_a) - gamma_i(t_b)| is an upper bound for d1;
    the transport LP only runs where that bound is not enough.
    """
    snapshots = flow(eta)
    times = eta.grid.times
    worst = np.inf
    pairs = 0
    exact = 0
    for a in range(eta.grid.size - 1):
        offsets = np.linalg.norm(eta.nodes[:, a + 1:, :] - eta.nodes[:, a:a + 1, :], axis=2)
        diagonal = eta.weights @ offsets
        allowed = constant * np.sqrt(times[a + 1:] - times[a])
        slack = allowed - diagonal
        for j in np.nonzero(slack < -HOLDER_PAIR_SLACK)[0]:
            slack[j] = allowed[j] - kantorovich_d1(snapshots[a], snapshots[a + 1 + j])
            exact += 1
        pairs += len(slack)
        worst = min(worst, float(np.min(slack)))
    if pairs == 0:
        worst = 0.0
    return HolderCheck(worst_slack=worst, passed=worst >= -CERTIFICATE_SLACK, pairs_checked=pairs,
                       exact_pairs=exact)


def rebase(eta: ArcMeasure, scenario: Scenario) -> ArcMeasure:
    if eta.grid != scenario.grid:
        raise GridMismatchError(f"Arc measure on {eta.grid!r} does not match scenario grid {scenario.grid!r}")
    return ArcMeasure(eta.grid, eta.nodes, eta.weights, scenario.initial_measure, check=False)


def verify(eta: ArcMeasure, scenario: Scenario, seed: Optional[int] = None, num_threads: Optional[int] = None,
           holder: Optional[Tuple[float, SupNorms]] = None, iterations: int = 0,
           trace: Optional[List[TraceRecord]] = None) -> EquilibriumCertificate:
    """Recomputes every certificate field from eta alone."""
    eta = rebase(eta, scenario)
    seed = scenario.seed if seed is None else seed
    deviation = eta.marginal_deviation()
    weight_error = abs(float(eta.weights.sum()) - 1.0)
    marginal = MarginalCheck(max_deviation=max(deviation, weight_error),
                             passed=deviation <= MEASURE_WEIGHT_TOL and weight_error <= MEASURE_WEIGHT_TOL)
    if not marginal.passed:
        logger.warning(f"Initial marginal violated by {marginal.max_deviation:.3g}")
    outcome = exploitability(eta, scenario.lagrangian, scenario.running, scenario.terminal, scenario.domain,
                             scenario.best_response, seed=seed, num_threads=num_threads)
    constant, norms = holder or holder_bound(scenario.lagrangian, scenario.running, scenario.terminal,
                                             scenario.horizon, scenario.domain,
                                             SolverDefaults.DEFAULT_SUP_NORM_RESOLUTION)
    max_energy = float(np.max(eta.energies()))
    energy = EnergyCheck(max_energy=max_energy, bound=constant, passed=max_energy <= constant + CERTIFICATE_SLACK)
    tol = scenario.solver.exploitability_tol
    return EquilibriumCertificate(
        exploitability=outcome.value,
        exploitability_tol=tol,
        converged=outcome.value <= tol,
        holder_constant=constant,
        sup_norms=norms,
        energy=energy,
        holder=holder_check(eta, constant),
        marginal=marginal,
        not_converged_atoms=outcome.not_converged,
        support_size=eta.size,
        iterations=iterations,
        seed=seed,
        trace=trace or [],
    )


class FictitiousPlaySolver:
    """Damped fictitious play: eta_k+1 = (1 - alpha_k) eta_k + alpha_k beta_k with beta_k a best response to eta_k."""

    def __init__(self, scenario: Scenario, config: Optional[SolverConfig] = None,
                 num_threads: Optional[int] = None):
        self.scenario = scenario
        self.config = config or scenario.solver
        self.num_threads = num_threads
        self.domain = scenario.domain
        self.br_solver = BestResponseSolver.for_lagrangian(scenario.domain, scenario.lagrangian,
                                                           scenario.best_response)
        self.merge_tol = (self.config.support_merge_tol if self.config.support_merge_tol is not None
                          else SUPPORT_MERGE_FACTOR * scenario.domain.diameter)
        self._previous: List[Optional[np.ndarray]] = [None] * scenario.initial_measure.size

    def check(self) -> None:
        report = check_assumptions(self.scenario.lagrangian, SolverDefaults.DEFAULT_ASSUMPTION_SAMPLES,
                                   self.domain, SolverDefaults.DEFAULT_ASSUMPTION_V_MAX, seed=self.scenario.seed)
        if not report.passed:
            raise AssumptionViolationError(
                f"Lagrangian {self.scenario.lagrangian.name!r} violates {', '.join(report.failures())}",
                report=report)

    def alpha(self, k: int) -> float:
        if self.config.damping == DAMPING_HARMONIC:
            return 1.0 / (k + 1)
        return self.config.fixed_alpha

    def initial_measure(self) -> ArcMeasure:
        m0 = self.scenario.initial_measure
        if self.config.initialization != INIT_RANDOM:
            return ArcMeasure.constant(m0, self.scenario.grid)
        rng = np.random.default_rng([self.scenario.seed, m0.size])
        arcs = [Arc(self.scenario.grid, self.br_solver.initial_guesses(x, self.scenario.grid, rng, 3)[-1])
                for x in m0.points]
        return ArcMeasure.from_arcs(arcs, m0.weights, m0)

    def best_response_measure(self, eta: ArcMeasure, cost: FrozenCost, k: int,
                              full: bool) -> Tuple[ArcMeasure, List[BestResponseResult]]:
        m0 = self.scenario.initial_measure
        starts = eta.start_indices()
        support_costs = cost.batch_values(eta.nodes)
        warm = []
        for j in range(m0.size):
            members = np.nonzero(starts == j)[0]
            candidates = [eta.nodes[members[np.argmin(support_costs[members])]]]
            if self._previous[j] is not None:
                candidates.append(self._previous[j])
            warm.append(candidates)
        results = solve_best_responses(self.br_solver, cost, m0.points, warm, self.scenario.seed, tag=k + 1,
                                       multistart_count=None if full else 1, num_threads=self.num_threads)
        arcs, weights = [], []
        for j, result in enumerate(results):
            self._previous[j] = result.arc.nodes
            chosen = [result.arc] + (result.ties if self.config.atom_splitting else [])
            arcs.extend(chosen)
            weights.extend([m0.weights[j] / len(chosen)] * len(chosen))
        return ArcMeasure.from_arcs(arcs, weights, m0, check=False), results

    def run(self) -> EquilibriumResult:
        scenario, cfg = self.scenario, self.config
        self.check()
        constant, norms = holder_bound(scenario.lagrangian, scenario.running, scenario.terminal, scenario.horizon,
                                       self.domain, SolverDefaults.DEFAULT_SUP_NORM_RESOLUTION)
        logger.info(f"Fictitious play on {scenario.name!r}: {scenario.initial_measure.size} atoms, "
                    f"{scenario.grid.steps} steps, K={constant:.4g}")
        eta = self.initial_measure()
        best_eta, best_value, best_iteration = eta, np.inf, 0
        trace: List[TraceRecord] = []
        timings: List[Tuple[int, float]] = []
        for k in range(cfg.max_outer_iters + 1):
            started = time.perf_counter()
            cost = FrozenCost.from_flow(scenario.grid, flow(eta), scenario.lagrangian, scenario.running,
                                        scenario.terminal)
            full = k % cfg.restart_interval == 0
            beta, results = self.best_response_measure(eta, cost, k, full)
            outcome: ExploitabilityResult = exploitability_against(eta, cost, results, eta.start_indices())
            alpha = self.alpha(k)
            trace.append(TraceRecord(iteration=k, exploitability=outcome.value,
                                     max_energy=float(np.max(eta.energies())), support_size=eta.size,
                                     alpha=alpha, not_converged=len(outcome.not_converged)))
            if outcome.value < best_value:
                best_eta, best_value, best_iteration = eta, outcome.value, k
            logger.info(f"Iteration {k}: exploitability={outcome.value:.6g}, support={eta.size}, "
                        f"alpha={alpha:.4g}")
            if outcome.flagged:
                logger.warning(f"Iteration {k}: {len(outcome.not_converged)} best responses not converged")
            done = outcome.value <= cfg.exploitability_tol or k == cfg.max_outer_iters
            if not done:
                eta = eta.mix(beta, alpha, self.merge_tol)
            timings.append((k, time.perf_counter() - started))
            if done:
                break
        certificate = verify(best_eta, scenario, num_threads=self.num_threads, holder=(constant, norms),
                             iterations=len(trace), trace=trace)
        if certificate.converged:
            logger.info(f"Converged: exploitability={certificate.exploitability:.6g} "
                        f"(best iterate {best_iteration})")
        else:
            logger.warning(f"Not converged after {len(trace)} iterations: exploitability="
                           f"{certificate.exploitability:.6g} > {cfg.exploitability_tol:g}")
        return EquilibriumResult(best_eta, certificate, trace, timings, best_iteration)


def solve(scenario: Scenario, cfg: Optional[SolverConfig] = None, num_threads: Optional[int] = None,
          strict: bool = False) -> Tuple[ArcMeasure, EquilibriumCertificate]:
    """Returns the best-exploitability iterate; with strict=True a miss raises NotConvergedError."""
    result = FictitiousPlaySolver(scenario, cfg, num_threads).run()
    if strict and not result.converged:
        raise NotConvergedError(f"Exploitability {result.exploitability:.6g} above tolerance", result=result)
    return result.eta, result.certificate
