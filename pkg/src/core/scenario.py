from typing import Optional
from src.core.arcs import TimeGrid
from src.core.coupling_skeleton import CouplingSkeleton
from src.core.domain_skeleton import DomainSkeleton
from src.core.lagrangian_skeleton import LagrangianSkeleton
from src.core.measures import SpatialMeasure
from src.models.scenario import BestResponseConfig, SolverConfig, ValueGridSpec, ScenarioSpec


class Scenario:
    """Resolved problem data (domain, L, F, G, m0, T) plus solver settings."""

    def __init__(self, name: str, domain: DomainSkeleton, lagrangian: LagrangianSkeleton,
                 running: CouplingSkeleton, terminal: CouplingSkeleton, initial_measure: SpatialMeasure,
                 grid: TimeGrid, best_response: Optional[BestResponseConfig] = None,
                 solver: Optional[SolverConfig] = None, value_grid: Optional[ValueGridSpec] = None,
                 seed: int = 0, spec: Optional[ScenarioSpec] = None):
        self.name = name
        self.domain = domain
        self.lagrangian = lagrangian
        self.running = running
        self.terminal = terminal
        self.initial_measure = initial_measure
        self.grid = grid
        self.best_response = best_response or BestResponseConfig()
        self.solver = solver or SolverConfig()
        self.value_grid = value_grid or ValueGridSpec()
        self.seed = seed
        self.spec = spec

    @property
    def horizon(self) -> float:
        return self.grid.horizon

    def with_seed(self, seed: int) -> 'Scenario':
        return Scenario(self.name, self.domain, self.lagrangian, self.running, self.terminal,
                        self.initial_measure, self.grid, self.best_response, self.solver, self.value_grid,
                        seed, self.spec)

    def with_solver(self, solver: SolverConfig) -> 'Scenario':
        return Scenario(self.name, self.domain, self.lagrangian, self.running, self.terminal,
                        self.initial_measure, self.grid, self.best_response, solver, self.value_grid,
                        self.seed, self.spec)

    def describe(self) -> dict:
        return {
            'name': self.name,
            'domain': self.domain.describe(),
            'lagrangian': self.lagrangian.describe(),
            'running_coupling': self.running.describe(),
            'terminal_coupling': self.terminal.describe(),
            'atoms': self.initial_measure.size,
            'horizon': self.grid.horizon,
            'time_steps': self.grid.steps,
            'seed': self.seed,
        }

    def __repr__(self) -> str:
        return f"Scenario({self.name!r}, atoms={self.initial_measure.size}, {self.grid!r})"
