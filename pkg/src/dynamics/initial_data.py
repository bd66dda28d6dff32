"""
Initial data for the front experiments.

indicator               eps 1{|x| <= r0}
smooth_bump             eps on |x| <= r0, C-infinity ramp to 0 over ``ramp``
algebraic_profile       min(eps, eps r0^(1+2a) |x|^-(1+2a)); eps defaults to sin(a pi)^(1+kappa)
plateau_stretched_exp   1 on |x| <= W, exp(-(|x| - W)^beta) outside
stretched_exp_gamma     min(1, exp(-gamma |x|^beta))

``beta`` defaults to the run's alpha. ``mollify`` applies a Gaussian
spectral filter of that width (at least 3 grid cells) before sampling ends.
"""
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Optional

import numpy as np

from src.core.exceptions import ConfigError, ConfigMismatchError, DomainError
from src.core.logger import LabLogger
from src.dynamics.solver import FieldState, SolverConfig, edge_zone_max
from src.fractional.asymptotics import alpha_level

logger = LabLogger.get_logger(__name__)

MIN_MOLLIFY_CELLS = 3.0


def _smoothstep(s: np.ndarray) -> np.ndarray:
    """C-infinity step: 1 for s <= 0, 0 for s >= 1"""
    s = np.clip(s, 0.0, 1.0)
    with np.errstate(divide="ignore", over="ignore"):
        rise = np.where(s > 0, np.exp(-1.0 / np.where(s > 0, s, 1.0)), 0.0)
        fall = np.where(s < 1, np.exp(-1.0 / np.where(s < 1, 1.0 - s, 1.0)), 0.0)
    return fall / (fall + rise)


def _require(params: Dict[str, Any], kind: str, *names: str):
    missing = [n for n in names if n not in params]
    if missing:
        raise ConfigError(f"{kind} requires parameters {', '.join(missing)}")


def _positive(value: float, name: str) -> float:
    value = float(value)
    if not value > 0 or not math.isfinite(value):
        raise DomainError(f"{name} must be positive, got {value}")
    return value


def _amplitude(value: float, name: str) -> float:
    value = float(value)
    if not 0 < value <= 1:
        raise DomainError(f"{name} must lie in (0, 1], got {value}")
    return value


def _indicator(x, p, config):
    eps, r0 = _amplitude(p["eps"], "eps"), _positive(p["r0"], "r0")
    return eps * (np.abs(x) <= r0), r0


def _smooth_bump(x, p, config):
    eps, r0 = _amplitude(p["eps"], "eps"), _positive(p["r0"], "r0")
    ramp = _positive(p.get("ramp", 1.0), "ramp")
    return eps * _smoothstep((np.abs(x) - r0) / ramp), r0 + ramp


def _algebraic_profile(x, p, config):
    alpha = config.params.alpha
    r0 = _positive(p["r0"], "r0")
    eps = p.get("eps_alpha")
    if eps is None:
        eps = alpha_level(config.params, float(p.get("kappa", 0.0)))
    eps = _amplitude(eps, "eps_alpha")
    ax = np.maximum(np.abs(x), 1e-300)
    return np.minimum(eps, eps * (r0 / ax) ** (1 + 2 * alpha)), None


def _plateau_stretched_exp(x, p, config):
    width = _positive(p["W"], "W")
    beta = _positive(p.get("beta", config.params.alpha), "beta")
    excess = np.maximum(np.abs(x) - width, 0.0)
    return np.exp(-excess ** beta), None


def _stretched_exp_gamma(x, p, config):
    gamma = _positive(p["gamma"], "gamma")
    beta = _positive(p.get("beta", config.params.alpha), "beta")
    return np.minimum(1.0, np.exp(-gamma * np.abs(x) ** beta)), None


PROFILES: Dict[str, Dict[str, Any]] = {
    "indicator": {"build": _indicator, "required": ("eps", "r0")},
    "smooth_bump": {"build": _smooth_bump, "required": ("eps", "r0")},
    "algebraic_profile": {"build": _algebraic_profile, "required": ("r0",)},
    "plateau_stretched_exp": {"build": _plateau_stretched_exp, "required": ("W",)},
    "stretched_exp_gamma": {"build": _stretched_exp_gamma, "required": ("gamma",)},
}

KIND_PARAMETERS = {
    "indicator": ("eps", "r0"),
    "smooth_bump": ("eps", "r0", "ramp"),
    "algebraic_profile": ("eps_alpha", "r0", "kappa"),
    "plateau_stretched_exp": ("W", "beta"),
    "stretched_exp_gamma": ("gamma", "beta"),
}


def gaussian_mollify(u: np.ndarray, config: SolverConfig, width: float) -> np.ndarray:
    """Convolve with a unit-mass Gaussian of standard deviation ``width`` spectrally"""
    k = config.wavenumbers
    filtered = np.fft.irfft(np.fft.rfft(u) * np.exp(-0.5 * (k * width) ** 2), n=config.N)
    return np.clip(filtered, 0.0, 1.0)


@dataclass(frozen=True)
class InitialDatum:
    """One of the named initial profiles with its parameters"""
    kind: str
    params: Dict[str, Any] = field(default_factory=dict)
    mollify: float = 0.0

    def __post_init__(self):
        if self.kind not in PROFILES:
            raise ConfigError(f"Unknown initial datum '{self.kind}'; choose from {sorted(PROFILES)}")
        unknown = set(self.params) - set(KIND_PARAMETERS[self.kind])
        if unknown:
            raise ConfigError(f"Unknown parameters for {self.kind}: {sorted(unknown)}")
        _require(self.params, self.kind, *PROFILES[self.kind]["required"])
        if self.mollify < 0:
            raise DomainError(f"mollify must be nonnegative, got {self.mollify}")

    def profile(self, x: np.ndarray, config: SolverConfig) -> np.ndarray:
        """Unmollified profile values at ``x``"""
        values, _ = PROFILES[self.kind]["build"](x, self.params, config)
        return np.asarray(values, dtype=float)

    def sample(self, config: SolverConfig) -> FieldState:
        """Grid sampling at t = 0, clamped to [0, 1]"""
        build: Callable = PROFILES[self.kind]["build"]
        values, support = build(config.x, self.params, config)
        values = np.clip(np.asarray(values, dtype=float), 0.0, 1.0)

        margin = config.L * (1.0 - config.edge_fraction)
        if support is not None and support > margin:
            raise ConfigMismatchError(
                f"{self.kind} support {support} exceeds L (1 - edge margin) = {margin}")

        if self.mollify > 0:
            if self.mollify < MIN_MOLLIFY_CELLS * config.h:
                raise DomainError(
                    f"mollify {self.mollify} is below {MIN_MOLLIFY_CELLS:g} grid cells ({config.h})")
            values = gaussian_mollify(values, config, self.mollify)

        edge = edge_zone_max(values, config.edge_points)
        if edge > config.edge_guard:
            raise ConfigMismatchError(
                f"{self.kind} reaches {edge:.3g} in the boundary zone (edge_guard {config.edge_guard})")

        logger.debug(f"Sampled {self.kind} on N={config.N}, L={config.L}", kind=self.kind)
        return FieldState(config, 0.0, values, 0)

    def to_dict(self) -> Dict[str, Any]:
        return {"kind": self.kind, "params": dict(self.params), "mollify": self.mollify}


def make_initial_datum(kind: str, config: SolverConfig, kind_params: Optional[Dict[str, Any]] = None,
                       mollify: float = 0.0) -> FieldState:
    """Sample the named profile on the grid of ``config``"""
    return InitialDatum(kind, dict(kind_params or {}), mollify).sample(config)
