from .scenario import (BestResponseConfig, SolverConfig, DomainSpec, DeclaredConstants, LagrangianSpec,
                       CouplingSpec, AtomSpec, ValueGridSpec, ScenarioSpec)
from .reports import (ConditionCheck, AssumptionReport, SupNorms, TraceRecord, EnergyCheck, HolderCheck,
                      MarginalCheck, EquilibriumCertificate, UniquenessReport, CompareReport)

__all__ = [
    'BestResponseConfig', 'SolverConfig', 'DomainSpec', 'DeclaredConstants', 'LagrangianSpec', 'CouplingSpec',
    'AtomSpec', 'ValueGridSpec', 'ScenarioSpec',
    'ConditionCheck', 'AssumptionReport', 'SupNorms', 'TraceRecord', 'EnergyCheck', 'HolderCheck',
    'MarginalCheck', 'EquilibriumCertificate', 'UniquenessReport', 'CompareReport',
]
