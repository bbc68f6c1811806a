from .run_config import RunConfig
from .solver_config import SolverDefaults
from .constants import *

class Config(RunConfig, SolverDefaults):
    pass

__all__ = ['Config', 'RunConfig', 'SolverDefaults']
