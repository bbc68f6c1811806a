from .quadratic_lagrangian import QuadraticLagrangian
from .speed_lagrangian import SpeedLagrangian
from .drift_lagrangian import DriftLagrangian

__all__ = ['QuadraticLagrangian', 'SpeedLagrangian', 'DriftLagrangian']
