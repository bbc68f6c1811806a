from .base import ConstrainedMFGError
from .geometry_errors import TubeExceededError, InvalidPointError, InfeasibleStartError, ClosestPointError
from .solver_errors import (NotConvergedError, AssumptionViolationError, SkippedNotConvergedError,
                            UnknownComponentError)
from .data_errors import (OutOfHorizonError, GridMismatchError, MarginalMismatchError, InvalidMeasureError,
                          ShapeMismatchError, ScenarioValidationError)

__all__ = [
    'ConstrainedMFGError',
    'TubeExceededError',
    'InvalidPointError',
    'InfeasibleStartError',
    'ClosestPointError',
    'NotConvergedError',
    'AssumptionViolationError',
    'SkippedNotConvergedError',
    'UnknownComponentError',
    'OutOfHorizonError',
    'GridMismatchError',
    'MarginalMismatchError',
    'InvalidMeasureError',
    'ShapeMismatchError',
    'ScenarioValidationError'
]
