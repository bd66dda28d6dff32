"""
Core components shared by the whole package: errors, logging, timing and file output.
"""

from src.core.exceptions import (
    LabError,
    UsageError,
    ConfigError,
    DomainError,
    QuadratureError,
    ValidationFailure,
    RunTruncated,
)
from src.core.logger import LabLogger
from src.core.utilities import PerformanceTimer, FileHandler, performance_timer, file_handler

__all__ = [
    'LabError',
    'UsageError',
    'ConfigError',
    'DomainError',
    'QuadratureError',
    'ValidationFailure',
    'RunTruncated',
    'LabLogger',
    'PerformanceTimer',
    'FileHandler',
    'performance_timer',
    'file_handler',
]
