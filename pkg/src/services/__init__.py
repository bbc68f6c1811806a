from .registry_service import RegistryService, ComponentInfo
from .scenario_service import ScenarioService
from .run_service import RunService, RunOutcome
from .compare_service import CompareService

__all__ = ['RegistryService', 'ComponentInfo', 'ScenarioService', 'RunService', 'RunOutcome', 'CompareService']
