from .domain_skeleton import DomainSkeleton
from .lagrangian_skeleton import LagrangianSkeleton
from .coupling_skeleton import CouplingSkeleton, SnapshotField, FlowField
from .arcs import TimeGrid, Arc, project_arc
from .measures import (SpatialMeasure, ArcMeasure, TransportPlan, pushforward, flow, disintegrate, reassemble,
                       kantorovich_d1, kantorovich_dual, optimal_plan)
from .costs import (FrozenCost, total_cost, holder_constant, holder_bound, check_assumptions, monotonicity_gap)
from .scenario import Scenario
from .best_response import BestResponseSolver, BestResponseResult, best_response, exploitability
from .equilibrium import FictitiousPlaySolver, EquilibriumResult, solve, verify
from .mild_solution import ValueGrid, value_function, dynamic_programming_residual, uniqueness_crosscheck

__all__ = [
    'DomainSkeleton', 'LagrangianSkeleton', 'CouplingSkeleton', 'SnapshotField', 'FlowField',
    'TimeGrid', 'Arc', 'project_arc',
    'SpatialMeasure', 'ArcMeasure', 'TransportPlan', 'pushforward', 'flow', 'disintegrate', 'reassemble',
    'kantorovich_d1', 'kantorovich_dual', 'optimal_plan',
    'FrozenCost', 'total_cost', 'holder_constant', 'holder_bound', 'check_assumptions', 'monotonicity_gap',
    'Scenario',
    'BestResponseSolver', 'BestResponseResult', 'best_response', 'exploitability',
    'FictitiousPlaySolver', 'EquilibriumResult', 'solve', 'verify',
    'ValueGrid', 'value_function', 'dynamic_programming_residual', 'uniqueness_crosscheck',
]
