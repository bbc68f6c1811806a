from typing import List, Tuple
from .base import ConstrainedMFGError


class OutOfHorizonError(ConstrainedMFGError):
    pass


class GridMismatchError(ConstrainedMFGError):
    pass


class MarginalMismatchError(ConstrainedMFGError):
    pass


class InvalidMeasureError(ConstrainedMFGError):
    pass


class ShapeMismatchError(ConstrainedMFGError):
    pass


class ScenarioValidationError(ConstrainedMFGError):
    def __init__(self, issues: List[Tuple[str, str]]):
        self.issues = list(issues)
        super().__init__("; ".join(f"{path}: {message}" for path, message in self.issues))

    @property
    def paths(self) -> List[str]:
        return [path for path, _ in self.issues]
