"""
Level-set front positions and regime fits.

The tracked crossing is the outermost one on the requested side: the
invasion boundary. Fits work on the displacement side_sign * x - origin,
so a left edge moving outward from a plateau at -W reads as a positive,
growing quantity.
"""
import math
from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from config.settings import settings
from src.core.exceptions import DegenerateFitError, DomainError, InsufficientSamplesError, InvariantError
from src.core.logger import LabLogger
from src.dynamics.solver import FieldState

logger = LabLogger.get_logger(__name__)

SIDES = ("right", "left")
MIN_WINDOW_SAMPLES = 5
WINDOW_SLACK = 1e-9


def _check_level(level: float):
    if not 0.0 < level < 1.0:
        raise DomainError(f"Level must lie in (0, 1), got {level}")


def _check_side(side: str):
    if side not in SIDES:
        raise DomainError(f"Side must be one of {SIDES}, got '{side}'")


def crossing_position(x: np.ndarray, u: np.ndarray, level: float, side: str = "right") -> Optional[float]:
    """
    Outermost crossing of ``level`` by linear interpolation.
    right: largest i with u_i >= level > u_{i+1}
    left:  smallest i with u_i < level <= u_{i+1}
    """
    _check_level(level)
    _check_side(side)
    lo, hi = u[:-1], u[1:]
    if side == "right":
        candidates = np.flatnonzero((lo >= level) & (hi < level))
        if candidates.size == 0:
            return None
        i = int(candidates[-1])
        frac = (u[i] - level) / (u[i] - u[i + 1])
    else:
        candidates = np.flatnonzero((lo < level) & (hi >= level))
        if candidates.size == 0:
            return None
        i = int(candidates[0])
        frac = (level - u[i]) / (u[i + 1] - u[i])
    return float(x[i] + frac * (x[i + 1] - x[i]))


def extract_front(snapshot: FieldState, level: float, side: str = "right") -> Optional[float]:
    """Front position x_level of one snapshot, or None when the level is not crossed"""
    return crossing_position(snapshot.config.x, snapshot.u, level, side)


@dataclass
class FrontTrace:
    """Time series of one level crossing"""
    level: float
    side: str
    samples: List[Tuple[float, float]] = field(default_factory=list)
    complete: bool = True
    origin: float = 0.0

    def __post_init__(self):
        _check_level(self.level)
        _check_side(self.side)
        self.samples = [(float(t), float(x)) for t, x in self.samples]
        times = [t for t, _ in self.samples]
        if any(b < a for a, b in zip(times, times[1:])):
            raise InvariantError("Trace samples must be sorted by time")
        if not all(math.isfinite(x) for _, x in self.samples):
            raise InvariantError("Trace positions must be finite")

    @property
    def side_sign(self) -> float:
        return 1.0 if self.side == "right" else -1.0

    @property
    def times(self) -> np.ndarray:
        return np.array([t for t, _ in self.samples])

    @property
    def positions(self) -> np.ndarray:
        return np.array([x for _, x in self.samples])

    @property
    def displacements(self) -> np.ndarray:
        return self.side_sign * self.positions - self.origin

    def to_rows(self, alpha: float) -> List[Tuple]:
        return [(alpha, self.level, self.side, t, x) for t, x in self.samples]


class FrontRecorder:
    """Run observer collecting crossings as snapshots arrive"""

    def __init__(self, level: float, side: str = "right", origin: float = 0.0):
        _check_level(level)
        _check_side(side)
        self.level = level
        self.side = side
        self.origin = origin
        self.samples: List[Tuple[float, float]] = []
        self.missing = 0

    def __call__(self, snapshot: FieldState):
        position = extract_front(snapshot, self.level, self.side)
        if position is None:
            self.missing += 1
        else:
            self.samples.append((snapshot.t, position))

    def trace(self) -> FrontTrace:
        return FrontTrace(self.level, self.side, list(self.samples), self.missing == 0, self.origin)


def trace_front(snapshots: Iterable[FieldState], level: float, side: str = "right",
                origin: float = 0.0) -> FrontTrace:
    """Extract one level crossing from every snapshot; complete is False if any lacks it"""
    recorder = FrontRecorder(level, side, origin)
    for snap in snapshots:
        recorder(snap)
    return recorder.trace()


@dataclass(frozen=True)
class LineFit:
    slope: float
    intercept: float
    residual_norm: float
    n_samples: int
    window: Tuple[float, float]


@dataclass(frozen=True)
class RegimeFit:
    """Linear speed, exponential rate and crossover of a trace"""
    level: float
    side: str
    linear: LineFit
    exponential: Optional[LineFit]
    crossover_time: Optional[float]
    crossover_factor: float

    @property
    def sigma_linear(self) -> float:
        return self.linear.slope

    @property
    def sigma_exp(self) -> Optional[float]:
        return None if self.exponential is None else self.exponential.slope

    def to_dict(self) -> Dict[str, Any]:
        return {
            "level": self.level,
            "side": self.side,
            "sigma_linear": self.sigma_linear,
            "sigma_exp": self.sigma_exp,
            "crossover_time": self.crossover_time,
            "crossover_factor": self.crossover_factor,
            "linear_window": list(self.linear.window),
            "exp_window": None if self.exponential is None else list(self.exponential.window),
            "residuals": {
                "linear": self.linear.residual_norm,
                "exp": None if self.exponential is None else self.exponential.residual_norm,
            },
        }


def _window(times: np.ndarray, window: Sequence[float]) -> np.ndarray:
    t0, t1 = float(window[0]), float(window[1])
    if t1 < t0:
        raise DomainError(f"Window end {t1} precedes start {t0}")
    mask = (times >= t0 - WINDOW_SLACK) & (times <= t1 + WINDOW_SLACK)
    if np.count_nonzero(mask) < MIN_WINDOW_SAMPLES:
        raise InsufficientSamplesError(
            f"Window [{t0}, {t1}] holds {np.count_nonzero(mask)} samples, need {MIN_WINDOW_SAMPLES}")
    return mask


def _line_fit(t: np.ndarray, y: np.ndarray, window: Sequence[float]) -> LineFit:
    if np.ptp(t) == 0:
        raise DegenerateFitError("Fit window has zero time variance")
    slope, intercept = np.polyfit(t, y, 1)
    residual = y - (slope * t + intercept)
    return LineFit(float(slope), float(intercept), float(np.linalg.norm(residual)), int(t.size),
                   (float(window[0]), float(window[1])))


def _crossover(times: np.ndarray, disp: np.ndarray, linear: LineFit, factor: float) -> Optional[float]:
    """First time the trace exceeds ``factor`` times the linear extrapolation"""
    start = linear.window[0] - WINDOW_SLACK
    previous = None
    for t, y in zip(times, disp):
        if t < start:
            continue
        reference = linear.intercept + linear.slope * t
        gap = y - factor * reference
        if reference > 0 and gap >= 0:
            if previous is None:
                return float(t)
            t_prev, gap_prev = previous
            return float(t_prev + (t - t_prev) * (-gap_prev) / (gap - gap_prev))
        previous = (t, gap) if reference > 0 else None
    return None


def fit_regimes(trace: FrontTrace, linear_window: Sequence[float], exp_window: Optional[Sequence[float]],
                crossover_factor: Optional[float] = None) -> RegimeFit:
    """
    Least squares of displacement against t on ``linear_window`` and of its
    logarithm against t on ``exp_window`` (skipped when None).
    """
    factor = settings.crossover_factor if crossover_factor is None else crossover_factor
    times, disp = trace.times, trace.displacements

    mask = _window(times, linear_window)
    linear = _line_fit(times[mask], disp[mask], linear_window)

    exponential = None
    if exp_window is not None:
        mask = _window(times, exp_window)
        if np.any(disp[mask] <= 0):
            raise DegenerateFitError("Exponential fit needs positive displacements")
        exponential = _line_fit(times[mask], np.log(disp[mask]), exp_window)

    fit = RegimeFit(trace.level, trace.side, linear, exponential,
                    _crossover(times, disp, linear, factor), factor)
    logger.log_fit(trace.level, fit.sigma_linear, fit.sigma_exp, fit.crossover_time)
    return fit


def linear_envelope_gap(alpha: float, t: float) -> float:
    """t^(1/alpha) - t: how far the sigma t^(1/alpha) envelope departs from linear"""
    if not 0 < alpha <= 1 or t < 0:
        raise DomainError(f"Need alpha in (0, 1] and t >= 0, got alpha={alpha}, t={t}")
    return t ** (1.0 / alpha) - t
