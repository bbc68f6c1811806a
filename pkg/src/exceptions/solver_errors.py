from typing import Any, Optional
from .base import ConstrainedMFGError


class NotConvergedError(ConstrainedMFGError):
    def __init__(self, message: str, result: Optional[Any] = None):
        self.result = result
        super().__init__(message)


class AssumptionViolationError(ConstrainedMFGError):
    def __init__(self, message: str, report: Optional[Any] = None):
        self.report = report
        super().__init__(message)


class SkippedNotConvergedError(ConstrainedMFGError):
    pass


class UnknownComponentError(ConstrainedMFGError):
    pass
