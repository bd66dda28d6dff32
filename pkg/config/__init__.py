"""
Configuration package: runtime settings and experiment recipes.
"""

from config.settings import LabSettings, settings

__all__ = ['LabSettings', 'settings']
