from typing import Dict, List, Optional
from pydantic import BaseModel, Field


class ConditionCheck(BaseModel):
    name: str = Field(..., examples=["L2"])
    worst_slack: float = Field(..., examples=[0.0])
    passed: bool = Field(..., examples=[True])
    samples: int = Field(0, examples=[2000])
    skipped: bool = Field(False)
    detail: str = Field("")


class AssumptionReport(BaseModel):
    lagrangian: str
    constants: Dict[str, float]
    checks: List[ConditionCheck]
    passed: bool

    def check(self, name: str) -> ConditionCheck:
        for entry in self.checks:
            if entry.name == name:
                return entry
        raise KeyError(name)

    def failures(self) -> List[str]:
        return [entry.name for entry in self.checks if not entry.passed and not entry.skipped]


class SupNorms(BaseModel):
    max_lagrangian_at_rest: float
    max_running: float
    max_terminal: float
    resolution: int
    sampled: bool = Field(True, description="Sup norms come from grid sampling, not a proof")


class TraceRecord(BaseModel):
    iteration: int
    exploitability: float
    max_energy: float
    support_size: int
    alpha: float
    not_converged: int


class EnergyCheck(BaseModel):
    max_energy: float
    bound: float
    passed: bool


class HolderCheck(BaseModel):
    worst_slack: float
    passed: bool
    pairs_checked: int
    exact_pairs: int


class MarginalCheck(BaseModel):
    max_deviation: float
    passed: bool


class EquilibriumCertificate(BaseModel):
    exploitability: float
    exploitability_tol: float
    converged: bool
    holder_constant: float
    sup_norms: SupNorms
    energy: EnergyCheck
    holder: HolderCheck
    marginal: MarginalCheck
    not_converged_atoms: List[int] = Field(default_factory=list)
    support_size: int
    iterations: int = 0
    seed: int = 0
    dp_residual: Optional[float] = None
    trace: List[TraceRecord] = Field(default_factory=list)

    @property
    def checks_passed(self) -> bool:
        return self.energy.passed and self.holder.passed and self.marginal.passed

    def pass_fail_fields(self) -> Dict[str, bool]:
        return {
            'converged': self.converged,
            'energy': self.energy.passed,
            'holder': self.holder.passed,
            'marginal': self.marginal.passed,
        }


class UniquenessReport(BaseModel):
    status: str
    message: str = ""
    seeds: List[int] = Field(default_factory=list)
    exploitabilities: List[float] = Field(default_factory=list)
    u_sup_diff: Optional[float] = None
    monotonicity_gaps: List[float] = Field(default_factory=list)
    coupling_gap_integral: Optional[float] = None
    d1_per_time: List[float] = Field(default_factory=list)
    field_gaps: List[float] = Field(default_factory=list)
    terminal_gap: Optional[float] = None
    u_tol: float
    gap_tol: float
    passed: Optional[bool] = None


class CompareReport(BaseModel):
    u_sup_diff: float
    d1_per_time: List[float]
    monotonicity_gaps: List[float]
    monotone_coupling: bool
    u_tol: float
    gap_tol: float
    passed: Optional[bool] = None
