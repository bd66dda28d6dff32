"""
Configuration settings for the laboratory.
Every field can be overridden through an ``FKPP_*`` environment variable
(or a ``.env`` file loaded by python-dotenv).
"""
import os
import json
from typing import Dict, Any, Optional, Tuple
from dataclasses import dataclass, field, asdict

from dotenv import load_dotenv

load_dotenv()


def _env_float(name: str, default: str) -> float:
    return float(os.getenv(name, default))


def _env_optional_float(name: str) -> Optional[float]:
    raw = os.getenv(name, "").strip()
    return float(raw) if raw else None


def _env_floats(name: str, default: str) -> Tuple[float, ...]:
    return tuple(float(v) for v in os.getenv(name, default).split(",") if v.strip())


@dataclass
class LabSettings:
    """
    Centralized numerical and runtime settings.
    Tolerances sit one to two orders below the acceptance tolerances that
    consume them.
    """

    # Logging Settings
    log_level: str = field(
        default_factory=lambda: os.getenv("FKPP_LOG_LEVEL", "WARNING")
    )
    log_dir: str = field(
        default_factory=lambda: os.getenv("FKPP_LOG_DIR", "logs")
    )
    log_to_file: bool = field(
        default_factory=lambda: os.getenv("FKPP_LOG_TO_FILE", "false").lower() == "true"
    )

    # Execution Settings
    threads: int = field(
        default_factory=lambda: max(1, int(os.getenv("FKPP_THREADS", str(os.cpu_count() or 1))))
    )

    # Quadrature
    quad_abs_tol: float = field(
        default_factory=lambda: _env_float("FKPP_QUAD_ABS_TOL", "1e-14")
    )
    quad_rel_tol: float = field(
        default_factory=lambda: _env_float("FKPP_QUAD_REL_TOL", "1e-11")
    )
    quad_max_subdivisions: int = field(
        default_factory=lambda: int(os.getenv("FKPP_QUAD_MAX_SUBDIVISIONS", "2000"))
    )
    quad_max_zeros: int = field(
        default_factory=lambda: int(os.getenv("FKPP_QUAD_MAX_ZEROS", "50000"))
    )
    gauss_legendre_order: int = field(
        default_factory=lambda: int(os.getenv("FKPP_GAUSS_LEGENDRE_ORDER", "20"))
    )

    # Kernel
    positivity_tol: float = field(
        default_factory=lambda: _env_float("FKPP_POSITIVITY_TOL", "1e-12")
    )
    symbol_decay_tol: float = field(
        default_factory=lambda: _env_float("FKPP_SYMBOL_DECAY_TOL", "1e-14")
    )

    # Asymptotics
    residual_constant: Optional[float] = field(
        default_factory=lambda: _env_optional_float("FKPP_RESIDUAL_CONSTANT")
    )
    residual_calibration_alphas: Tuple[float, ...] = field(
        default_factory=lambda: _env_floats("FKPP_RESIDUAL_CALIBRATION_ALPHAS", "0.9,0.95,0.99")
    )
    residual_calibration_range: Tuple[float, ...] = field(
        default_factory=lambda: _env_floats("FKPP_RESIDUAL_CALIBRATION_RANGE", "1,100")
    )
    residual_calibration_samples: int = field(
        default_factory=lambda: int(os.getenv("FKPP_RESIDUAL_CALIBRATION_SAMPLES", "40"))
    )
    residual_ratio_limit: float = field(
        default_factory=lambda: _env_float("FKPP_RESIDUAL_RATIO_LIMIT", "3.0")
    )
    tau_band: Tuple[float, ...] = field(
        default_factory=lambda: _env_floats("FKPP_TAU_BAND", "0.8,1.8")
    )

    # Solver and fronts
    range_tol: float = field(
        default_factory=lambda: _env_float("FKPP_RANGE_TOL", "1e-10")
    )
    edge_fraction: float = field(
        default_factory=lambda: _env_float("FKPP_EDGE_FRACTION", "0.05")
    )
    crossover_factor: float = field(
        default_factory=lambda: _env_float("FKPP_CROSSOVER_FACTOR", "2.0")
    )

    def to_dict(self) -> Dict[str, Any]:
        """Convert settings to dictionary"""
        data = asdict(self)
        for key, value in data.items():
            if isinstance(value, tuple):
                data[key] = list(value)
        return data

    def save_to_file(self, filepath: str = "config/settings.json"):
        """Save settings to JSON file"""
        with open(filepath, 'w') as f:
            json.dump(self.to_dict(), f, indent=2, sort_keys=True)

    @classmethod
    def load_from_file(cls, filepath: str = "config/settings.json") -> 'LabSettings':
        """Load settings from JSON file"""
        with open(filepath, 'r') as f:
            data = json.load(f)

        for key, value in data.items():
            if isinstance(value, list):
                data[key] = tuple(value)

        return cls(**data)


# Global settings instance
settings = LabSettings()
