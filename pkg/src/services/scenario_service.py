import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union
import numpy as np
from pydantic import ValidationError
from src.core.arcs import TimeGrid
from src.core.measures import SpatialMeasure
from src.core.scenario import Scenario
from src.exceptions import ScenarioValidationError, UnknownComponentError, InvalidMeasureError
from src.models.scenario import ScenarioSpec, CouplingSpec
from src.services.registry_service import RegistryService

logger = logging.getLogger(__name__)


def field_path(loc: Tuple[Any, ...]) -> str:
    """('initial_measure', 2, 'point') -> 'initial_measure[2].point'."""
    path = ""
    for part in loc:
        if isinstance(part, int):
            path += f"[{part}]"
        else:
            path += f".{part}" if path else str(part)
    return path or "<root>"


class ScenarioService:
    @staticmethod
    def parse(data: Dict[str, Any]) -> ScenarioSpec:
        try:
            return ScenarioSpec.model_validate(data)
        except ValidationError as e:
            raise ScenarioValidationError([(field_path(err['loc']), err['msg']) for err in e.errors()]) from None

    @staticmethod
    def load_spec(path: Union[str, Path]) -> ScenarioSpec:
        path = Path(path)
        try:
            data = json.loads(path.read_text())
        except FileNotFoundError:
            raise ScenarioValidationError([("<file>", f"scenario file {str(path)!r} not found")]) from None
        except json.JSONDecodeError as e:
            raise ScenarioValidationError([("<file>", f"invalid JSON at line {e.lineno}: {e.msg}")]) from None
        if not isinstance(data, dict):
            raise ScenarioValidationError([("<root>", "scenario must be a JSON object")])
        return ScenarioService.parse(data)

    @staticmethod
    def _coupling(spec: CouplingSpec, domain, path: str, issues: List[Tuple[str, str]]):
        try:
            coupling_class = RegistryService.load_coupling_class(spec.name)
        except UnknownComponentError as e:
            issues.append((f"{path}.name", str(e)))
            return None
        try:
            return coupling_class(domain=domain, **spec.params)
        except (TypeError, ValueError) as e:
            issues.append((f"{path}.params", str(e)))
            return None

    @staticmethod
    def build(spec: ScenarioSpec, seed: Optional[int] = None) -> Scenario:
        """Resolve component names, check m0 against the domain and normalize its weights."""
        issues: List[Tuple[str, str]] = []
        try:
            domain_class = RegistryService.load_domain_class(spec.domain.kind)
            domain = domain_class.from_params(spec.domain.params, spec.domain.tube_radius)
        except UnknownComponentError as e:
            raise ScenarioValidationError([("domain.kind", str(e))]) from None
        except (TypeError, ValueError) as e:
            raise ScenarioValidationError([("domain.params", str(e))]) from None
        if not domain.validate_tube_radius():
            issues.append(("domain.tube_radius",
                           f"|Db| deviates from 1 inside the tube of radius {domain.tube_radius:g}"))

        lagrangian = None
        try:
            lagrangian_class = RegistryService.load_lagrangian_class(spec.lagrangian.name)
            declared = spec.lagrangian.constants
            lagrangian = lagrangian_class(growth=declared.C, coercivity=declared.c1, offset=declared.c0,
                                          **spec.lagrangian.params)
        except UnknownComponentError as e:
            issues.append(("lagrangian.name", str(e)))
        except (TypeError, ValueError) as e:
            issues.append(("lagrangian.params", str(e)))
        running = ScenarioService._coupling(spec.running_coupling, domain, "running_coupling", issues)
        terminal = ScenarioService._coupling(spec.terminal_coupling, domain, "terminal_coupling", issues)

        for i, atom in enumerate(spec.initial_measure):
            if len(atom.point) != domain.dim:
                issues.append((f"initial_measure[{i}].point",
                               f"atom has dimension {len(atom.point)}, domain has {domain.dim}"))
                continue
            b = domain.signed_distance(np.asarray(atom.point, dtype=float))
            if b > domain.feasibility_tol:
                issues.append((f"initial_measure[{i}].point",
                               f"atom {atom.point} lies outside the domain closure (b = {b:.3g})"))
        if issues:
            raise ScenarioValidationError(issues)

        weights = np.array([atom.weight for atom in spec.initial_measure])
        try:
            m0 = SpatialMeasure([atom.point for atom in spec.initial_measure], weights / weights.sum()).merged()
        except InvalidMeasureError as e:
            raise ScenarioValidationError([("initial_measure", str(e))]) from None
        if abs(weights.sum() - 1.0) > 1e-12:
            logger.info(f"Scenario {spec.name!r}: normalized m0 weights (sum was {weights.sum():.6g})")
        return Scenario(spec.name, domain, lagrangian, running, terminal, m0, TimeGrid(spec.horizon, spec.time_steps),
                        spec.best_response, spec.solver, spec.value_grid,
                        spec.seed if seed is None else seed, spec)

    @staticmethod
    def load(path: Union[str, Path], seed: Optional[int] = None) -> Scenario:
        spec = ScenarioService.load_spec(path)
        if seed is not None:
            spec = spec.model_copy(update={'seed': seed})
        return ScenarioService.build(spec)
