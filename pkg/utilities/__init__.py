"""
Utilities package for run bookkeeping.
"""

from utilities.run_reporter import RunReporter, verify_manifest

__all__ = ['RunReporter', 'verify_manifest']
