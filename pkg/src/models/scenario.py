from typing import Any, Dict, List, Optional
from pydantic import BaseModel, Field, field_validator, model_validator
from src.config import SolverDefaults
from src.config.constants import (SCENARIO_VERSION, DAMPING_HARMONIC, DAMPING_FIXED, INIT_CONSTANT,
                                  INIT_RANDOM)

_BR = SolverDefaults.get_best_response_defaults()
_FP = SolverDefaults.get_solver_defaults()


class BestResponseConfig(BaseModel):
    multistart_count: int = Field(_BR['multistart_count'], ge=1, examples=[4])
    max_iters: int = Field(_BR['max_iters'], ge=1, examples=[400])
    gradient_tol: float = Field(_BR['gradient_tol'], gt=0, examples=[1e-6])
    armijo: float = Field(_BR['armijo'], gt=0, lt=1)
    backtrack_factor: float = Field(_BR['backtrack_factor'], gt=0, lt=1)
    max_backtracks: int = Field(_BR['max_backtracks'], ge=1)
    max_step: float = Field(_BR['max_step'], gt=0)
    perturbation_scale: float = Field(_BR['perturbation_scale'], gt=0, examples=[0.05])
    feasibility_tol: Optional[float] = Field(_BR['feasibility_tol'], gt=0,
                                             description="Defaults to 1e-9 times the domain diameter")


class SolverConfig(BaseModel):
    max_outer_iters: int = Field(_FP['max_outer_iters'], ge=0, examples=[200])
    exploitability_tol: float = Field(_FP['exploitability_tol'], gt=0, examples=[1e-3])
    damping: str = Field(_FP['damping'], examples=[DAMPING_HARMONIC])
    fixed_alpha: float = Field(_FP['fixed_alpha'], gt=0, le=1)
    atom_splitting: bool = Field(_FP['atom_splitting'])
    initialization: str = Field(_FP['initialization'], examples=[INIT_CONSTANT])
    restart_interval: int = Field(_FP['restart_interval'], ge=1)
    support_merge_tol: Optional[float] = Field(_FP['support_merge_tol'], ge=0,
                                               description="Defaults to 1e-4 times the domain diameter")

    @field_validator('damping')
    @classmethod
    def _known_damping(cls, value: str) -> str:
        if value not in (DAMPING_HARMONIC, DAMPING_FIXED):
            raise ValueError(f"damping must be '{DAMPING_HARMONIC}' or '{DAMPING_FIXED}'")
        return value

    @field_validator('initialization')
    @classmethod
    def _known_initialization(cls, value: str) -> str:
        if value not in (INIT_CONSTANT, INIT_RANDOM):
            raise ValueError(f"initialization must be '{INIT_CONSTANT}' or '{INIT_RANDOM}'")
        return value


class DomainSpec(BaseModel):
    kind: str = Field(..., examples=["disc"])
    tube_radius: float = Field(..., gt=0, examples=[0.5])
    params: Dict[str, Any] = Field(default_factory=dict, examples=[{"center": [0, 0], "radius": 1.0}])


class DeclaredConstants(BaseModel):
    C: Optional[float] = Field(None, gt=0)
    c0: Optional[float] = Field(None, ge=0)
    c1: Optional[float] = Field(None, gt=0)


class LagrangianSpec(BaseModel):
    name: str = Field(..., examples=["quadratic"])
    params: Dict[str, Any] = Field(default_factory=dict, examples=[{"scale": 0.5}])
    constants: DeclaredConstants = Field(default_factory=DeclaredConstants)


class CouplingSpec(BaseModel):
    name: str = Field("zero", examples=["convolution"])
    params: Dict[str, Any] = Field(default_factory=dict)


class AtomSpec(BaseModel):
    point: List[float] = Field(..., min_length=1, examples=[[0.1, -0.2]])
    weight: float = Field(..., gt=0, examples=[0.25])


class ValueGridSpec(BaseModel):
    resolution: int = Field(SolverDefaults.DEFAULT_VALUE_GRID_RESOLUTION, ge=2)
    multistart_count: int = Field(SolverDefaults.DEFAULT_VALUE_MULTISTART_COUNT, ge=1)


class ScenarioSpec(BaseModel):
    version: int = Field(SCENARIO_VERSION, examples=[1])
    name: str = Field(..., min_length=1, examples=["crowd_aversion"])
    description: str = Field("")
    domain: DomainSpec
    lagrangian: LagrangianSpec
    running_coupling: CouplingSpec = Field(default_factory=CouplingSpec)
    terminal_coupling: CouplingSpec = Field(default_factory=CouplingSpec)
    initial_measure: List[AtomSpec] = Field(..., min_length=1)
    horizon: float = Field(..., gt=0, examples=[1.0])
    time_steps: int = Field(..., ge=1, examples=[32])
    value_grid: ValueGridSpec = Field(default_factory=ValueGridSpec)
    best_response: BestResponseConfig = Field(default_factory=BestResponseConfig)
    solver: SolverConfig = Field(default_factory=SolverConfig)
    seed: int = Field(0, ge=0)

    @field_validator('version')
    @classmethod
    def _supported_version(cls, value: int) -> int:
        if value != SCENARIO_VERSION:
            raise ValueError(f"unsupported scenario version {value}; expected {SCENARIO_VERSION}")
        return value

    @model_validator(mode='after')
    def _consistent_dimensions(self) -> 'ScenarioSpec':
        dims = {len(atom.point) for atom in self.initial_measure}
        if len(dims) > 1:
            raise ValueError(f"initial_measure atoms have mixed dimensions {sorted(dims)}")
        return self
