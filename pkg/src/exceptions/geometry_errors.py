from .base import ConstrainedMFGError


class TubeExceededError(ConstrainedMFGError):
    def __init__(self, distance: float, tube_radius: float):
        self.distance = distance
        self.tube_radius = tube_radius
        super().__init__(
            f"Point at distance {distance:.6g} from the domain is outside the tube of radius {tube_radius:.6g}"
        )


class InvalidPointError(ConstrainedMFGError):
    pass


class InfeasibleStartError(ConstrainedMFGError):
    pass


class ClosestPointError(ConstrainedMFGError):
    def __init__(self, point, residual: float):
        self.point = point
        self.residual = residual
        super().__init__(f"No closest boundary point found for {point}; stationarity residual {residual:.3g}")
