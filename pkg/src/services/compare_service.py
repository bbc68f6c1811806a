import logging
from pathlib import Path
from typing import Union
import numpy as np
from src.config import SolverDefaults
from src.core.measures import flow
from src.core.mild_solution import compare_flows, monotone_precondition
from src.data.artifact_repository import ArtifactRepository
from src.exceptions import ShapeMismatchError
from src.models.reports import CompareReport
from src.services.scenario_service import ScenarioService

logger = logging.getLogger(__name__)


class CompareService:
    @staticmethod
    def compare(first_dir: Union[str, Path], second_dir: Union[str, Path],
                u_tol: float = SolverDefaults.DEFAULT_UNIQUENESS_U_TOL,
                gap_tol: float = SolverDefaults.DEFAULT_UNIQUENESS_GAP_TOL) -> CompareReport:
        """Value-function and flow differences of two completed runs.

        Pass/fail is only claimed when the first run's couplings pass the monotonicity gate.
        """
        first, second = ArtifactRepository(first_dir), ArtifactRepository(second_dir)
        eta_a, eta_b = first.load_equilibrium(), second.load_equilibrium()
        if eta_a.grid != eta_b.grid or eta_a.dim != eta_b.dim:
            raise ShapeMismatchError(f"Runs differ in shape: {eta_a.grid!r}/{eta_a.dim}D vs "
                                     f"{eta_b.grid!r}/{eta_b.dim}D")
        u_a, u_b = first.load_value_grid(eta_a.grid), second.load_value_grid(eta_b.grid)
        scenario = ScenarioService.build(ScenarioService.parse(first.load_scenario()))
        u_diff = u_a.sup_difference(u_b)
        distances, gaps = compare_flows(scenario.running, flow(eta_a), flow(eta_b))
        monotone = monotone_precondition(scenario) is None
        passed = None
        if monotone:
            passed = u_diff <= u_tol and float(np.max(np.abs(gaps))) <= gap_tol
        else:
            logger.info("Couplings are not strictly monotone; comparison carries no pass/fail claim")
        return CompareReport(u_sup_diff=u_diff, d1_per_time=distances, monotonicity_gaps=gaps,
                             monotone_coupling=monotone, u_tol=u_tol, gap_tol=gap_tol, passed=passed)
