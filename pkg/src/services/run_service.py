import logging
from pathlib import Path
from typing import Optional, Union
from src.config import RunConfig
from src.config.constants import (EXIT_CONVERGED, EXIT_NOT_CONVERGED, UNIQUENESS_SKIPPED_NOT_CONVERGED)
from src.core.equilibrium import EquilibriumResult, FictitiousPlaySolver
from src.core.measures import flow
from src.core.mild_solution import ValueGrid, dynamic_programming_residual, uniqueness_crosscheck, value_function
from src.core.scenario import Scenario
from src.data.artifact_repository import ArtifactRepository
from src.data.run_repository import RunRepository
from src.exceptions import SkippedNotConvergedError
from src.models.reports import EquilibriumCertificate, UniquenessReport
from src.services.scenario_service import ScenarioService
from src.config import SolverDefaults

logger = logging.getLogger(__name__)


class RunOutcome:
    def __init__(self, exit_code: int, out_dir: Path, scenario: Scenario, result: EquilibriumResult,
                 certificate: EquilibriumCertificate, value_grid: ValueGrid,
                 uniqueness: Optional[UniquenessReport] = None, run_id: Optional[int] = None):
        self.exit_code = exit_code
        self.out_dir = out_dir
        self.scenario = scenario
        self.result = result
        self.certificate = certificate
        self.value_grid = value_grid
        self.uniqueness = uniqueness
        self.run_id = run_id

    def dict(self) -> dict:
        return {
            'exit_code': self.exit_code,
            'out_dir': str(self.out_dir),
            'scenario': self.scenario.name,
            'exploitability': self.certificate.exploitability,
            'converged': self.certificate.converged,
            'checks': self.certificate.pass_fail_fields(),
            'dp_residual': self.certificate.dp_residual,
            'uniqueness': self.uniqueness.status if self.uniqueness else None,
            'run_id': self.run_id,
        }


class RunService:
    """Solve a scenario file and write every artifact of the run directory."""

    def __init__(self, run_repository: Optional[RunRepository] = None, num_threads: Optional[int] = None,
                 record: bool = True):
        self.run_repository = run_repository
        self.num_threads = num_threads if num_threads is not None else RunConfig.num_threads()
        self.record = record

    def run(self, scenario_path: Union[str, Path], out_dir: Union[str, Path], seed: Optional[int] = None,
            uniqueness_check: bool = False) -> RunOutcome:
        spec = ScenarioService.load_spec(scenario_path)
        if seed is not None:
            spec = spec.model_copy(update={'seed': seed})
        scenario = ScenarioService.build(spec)
        artifacts = ArtifactRepository(out_dir)
        artifacts.save_scenario(spec.model_dump(mode='json'))
        artifacts.save_initial_measure(scenario.initial_measure)
        logger.info(f"Running scenario {scenario.name!r} (seed {scenario.seed}) into {artifacts.out_dir}")

        result = FictitiousPlaySolver(scenario, num_threads=self.num_threads).run()
        artifacts.save_equilibrium(result.eta)
        artifacts.save_flow(result.eta)
        artifacts.save_trace(result.trace)
        artifacts.save_timings(result.timings)

        flow_k = flow(result.eta)
        u = value_function(flow_k, scenario.lagrangian, scenario.running, scenario.terminal, scenario.domain,
                           scenario.grid, scenario.value_grid, scenario.best_response, seed=scenario.seed,
                           num_threads=self.num_threads)
        residual = dynamic_programming_residual(u, flow_k, scenario.lagrangian, scenario.running, scenario.terminal)
        certificate = result.certificate.model_copy(update={'dp_residual': residual})
        artifacts.save_value_grid(u)
        artifacts.save_certificate(certificate)
        logger.info(f"Value grid: {len(u.points)} points, DP residual {residual:.3g}")

        uniqueness = None
        if uniqueness_check:
            uniqueness = self._uniqueness(scenario, result)
            artifacts.save_uniqueness(uniqueness)

        exit_code = EXIT_CONVERGED if certificate.converged else EXIT_NOT_CONVERGED
        run_id = self._record(scenario_path, artifacts.out_dir, scenario, certificate, exit_code)
        return RunOutcome(exit_code, artifacts.out_dir, scenario, result, certificate, u, uniqueness, run_id)

    def _uniqueness(self, scenario: Scenario, result: EquilibriumResult) -> UniquenessReport:
        seeds = [scenario.seed, scenario.seed + 1]
        try:
            return uniqueness_crosscheck(scenario, seeds, first=result, num_threads=self.num_threads)
        except SkippedNotConvergedError as e:
            logger.warning(f"Uniqueness cross-check skipped: {e}")
            return UniquenessReport(status=UNIQUENESS_SKIPPED_NOT_CONVERGED, message=str(e), seeds=seeds,
                                    u_tol=SolverDefaults.DEFAULT_UNIQUENESS_U_TOL,
                                    gap_tol=SolverDefaults.DEFAULT_UNIQUENESS_GAP_TOL)

    def _record(self, scenario_path, out_dir: Path, scenario: Scenario, certificate: EquilibriumCertificate,
                exit_code: int) -> Optional[int]:
        if not self.record:
            return None
        try:
            repository = self.run_repository or RunRepository()
            return repository.save_run({
                'scenario': scenario.name,
                'scenario_path': str(scenario_path),
                'output_dir': str(out_dir),
                'seed': scenario.seed,
                'exploitability': certificate.exploitability,
                'converged': certificate.converged,
                'iterations': certificate.iterations,
                'energy_passed': certificate.energy.passed,
                'holder_passed': certificate.holder.passed,
                'exit_code': exit_code,
                'parameters': {
                    'solver': scenario.solver.model_dump(),
                    'best_response': scenario.best_response.model_dump(),
                },
            })
        except Exception as e:
            logger.warning(f"Could not record run in the run index: {e}")
            return None
