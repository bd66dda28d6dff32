"""
Oracle constants and acceptance thresholds for the test suite.
"""
from pathlib import Path
from typing import Any, Dict

from src.core.utilities import file_handler

DATA_DIR = Path(__file__).parent
REFERENCE_FILE = DATA_DIR / "reference_values.yaml"


def load_reference_values(path: Path = REFERENCE_FILE) -> Dict[str, Any]:
    """Load the YAML oracle table"""
    return file_handler.read_yaml(str(path))


__all__ = ['DATA_DIR', 'REFERENCE_FILE', 'load_reference_values']
