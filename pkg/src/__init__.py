"""
Fractional Fisher-KPP Laboratory
================================

Numerical laboratory for u_t + (-Delta)^alpha u = u - u^2: the fractional
heat kernel and its two-term expansion as alpha -> 1, the transition time
tau_alpha, and front-propagation experiments on a periodic spectral solver.

Modules:
--------
- src.core: Logging, exceptions, timing and file output
- src.numerics: Quadrature drivers and special functions
- src.fractional: Kernel evaluation and asymptotics
- src.dynamics: Solver, initial data, fronts and sweeps
- src.formats: Output schemas and writers
- config: Settings and experiment recipes
- utilities: Run manifests

Usage:
------
1. Install dependencies: pip install -r requirements.txt
2. Run a command: python -m src kernel --alpha 0.5 --xs 0,1,2
3. Run tests: pytest (add -m acceptance for the desk-scale experiments)
"""

__version__ = "1.0.0"

from src.core.exceptions import LabError
from src.fractional.params import FracParams

__all__ = ["__version__", "LabError", "FracParams"]
