"""
Exception hierarchy for the laboratory.
Every error carries the CLI exit code it maps to.
"""
from typing import Optional


class LabError(Exception):
    """Base class for all laboratory errors"""
    exit_code = 1


class UsageError(LabError):
    """Bad command-line usage"""
    exit_code = 1


class ConfigError(LabError):
    """Malformed or unknown configuration entry"""
    exit_code = 1


class DomainError(LabError, ValueError):
    """Argument outside the mathematical domain of an operation"""
    exit_code = 2


class ResolutionError(DomainError):
    """Grid does not resolve the spectral symbol"""


class ConfigMismatchError(DomainError):
    """Initial datum does not fit the configured domain"""


class InvariantError(DomainError):
    """A documented invariant of a result object does not hold"""


class NoRootError(DomainError):
    """Root-finding problem has no admissible root"""


class InsufficientSamplesError(DomainError):
    """Too few samples inside a fit window"""


class DegenerateFitError(DomainError):
    """Least-squares problem is degenerate"""


class RangeViolationError(DomainError):
    """Solution left [0, 1] beyond the configured tolerance"""

    def __init__(self, message: str, t: float, umin: float, umax: float):
        super().__init__(message)
        self.t = t
        self.umin = umin
        self.umax = umax


class QuadratureError(LabError):
    """Numerical integration failed"""
    exit_code = 3


class NonConvergenceError(QuadratureError):
    """Integration budget exhausted before reaching tolerance"""

    def __init__(self, message: str, value: float, err_est: float):
        super().__init__(f"{message} (best value {value!r}, error estimate {err_est:.3g})")
        self.value = value
        self.err_est = err_est


class AccelerationStagnationError(QuadratureError):
    """Alternating-series tail stopped decreasing"""

    def __init__(self, message: str, value: Optional[float] = None):
        super().__init__(message)
        self.value = value


class ValidationFailure(LabError):
    """A numerical validation check did not pass"""
    exit_code = 4


class RunTruncated(LabError):
    """Solver run stopped before t_end"""
    exit_code = 5


class EdgeGuardViolation(RunTruncated):
    """Solution reached the boundary zone of the periodic domain"""

    def __init__(self, message: str, t: float, edge_max: float):
        super().__init__(message)
        self.t = t
        self.edge_max = edge_max
