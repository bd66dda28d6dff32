"""
Two-term large-radius expansion of the fractional heat kernel, the
residual bound, the critical radius xi_alpha, the transition time tau_alpha
and the regime classifier.

Profile expansion (t = 1):

    p_alpha(x) = tail + gauss + residual
    d = 1:   tail  = Gamma(2a+1) sin(a pi) / (pi x^(1+2a))
             gauss = exp(-x^(2a)/4) / (2 sqrt(pi) x^(1-a))
    d >= 2:  tail  = 2 (2 pi)^(-(d+1)/2) sin(a pi) D_a x^(-(d+2a))
             gauss = (4 pi)^(-d/2) x^(-(1-a) d) exp(-x^(2a)/4) / a
    |residual| <= C (1-a) / (pi x^(d+4a))
"""
import math
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple, Any

import numpy as np
from scipy import optimize

from config.settings import settings
from src.core.exceptions import DomainError, InvariantError, LabError, NoRootError
from src.core.logger import LabLogger
from src.fractional.kernel import (
    kernel_profile,
    kernel_profile_1d,
    kernel_profile_dd,
    tail_series_coefficient,
)
from src.fractional.params import FracParams
from src.numerics.quadrature import QuadSpec
from src.numerics.specfun import d_alpha, gamma_fn

logger = LabLogger.get_logger(__name__)


class Regime(str, Enum):
    GAUSSIAN_DOMINANT = "gaussian_dominant"
    TAIL_DOMINANT = "tail_dominant"


@dataclass(frozen=True)
class KernelDecomposition:
    """Expansion terms of p at one radius (and time t)"""
    alpha: float
    d: int
    x: float
    tail_term: float
    gauss_term: float
    kernel_value: float
    residual: float
    bound: float
    log_gauss_term: float
    t: float = 1.0

    def __post_init__(self):
        if not self.x > 0:
            raise InvariantError(f"Decomposition radius must be positive, got {self.x}")
        if self.residual != self.kernel_value - self.tail_term - self.gauss_term:
            raise InvariantError("residual must equal kernel_value - tail_term - gauss_term")
        # gauss_term may underflow to 0.0; its logarithm stays finite
        if not self.tail_term > 0 or not math.isfinite(self.log_gauss_term) or self.gauss_term < 0:
            raise InvariantError(f"Expansion terms must be positive at x={self.x}")

    @property
    def normalized_residual(self) -> float:
        """|residual| x^(d+4a) pi / ((1-a) t^2)"""
        return (abs(self.residual) * self.x ** (self.d + 4 * self.alpha) * math.pi
                / ((1.0 - self.alpha) * self.t ** 2))

    def to_row(self) -> Tuple:
        return (self.alpha, self.d, self.x, self.kernel_value, self.tail_term, self.gauss_term,
                self.residual, self.normalized_residual)


def assembled_tail_coefficient(params: FracParams) -> float:
    """Coefficient of x^(-(d+2a)) in the tail term"""
    a, d = params.alpha, params.d
    if d == 1:
        return gamma_fn(2 * a + 1) * math.sin(a * math.pi) / math.pi
    return 2.0 * (2.0 * math.pi) ** (-(d + 1) / 2.0) * math.sin(a * math.pi) * d_alpha(params)


def gauss_coefficient(params: FracParams) -> float:
    a, d = params.alpha, params.d
    if d == 1:
        return 1.0 / (2.0 * math.sqrt(math.pi))
    return (4.0 * math.pi) ** (-d / 2.0) / a


def stable_tail_coefficient(params: FracParams) -> float:
    """Exact algebraic-tail constant a 2^(2a) Gamma(a + d/2) Gamma(a) sin(a pi) / pi^(d/2+1)"""
    params.require_fractional("stable_tail_coefficient")
    return tail_series_coefficient(params, 1)


def tail_normalization_ratio(params: FracParams) -> float:
    """Assembled tail constant over the exact one (1 for d = 1)"""
    return assembled_tail_coefficient(params) / stable_tail_coefficient(params)


def alpha_level(params: FracParams, kappa: float = 0.0) -> float:
    """Default algebraic-profile amplitude eps_alpha = sin(a pi)^(1 + kappa)"""
    if kappa < 0:
        raise DomainError(f"kappa must be nonnegative, got {kappa}")
    return math.sin(params.alpha * math.pi) ** (1.0 + kappa)


def _log_terms(params: FracParams, y: float) -> Tuple[float, float]:
    a, d = params.alpha, params.d
    log_tail = math.log(assembled_tail_coefficient(params)) - (d + 2 * a) * math.log(y)
    log_gauss = math.log(gauss_coefficient(params)) - (1 - a) * d * math.log(y) - 0.25 * y ** (2 * a)
    return log_tail, log_gauss


def _decompose_profile(params: FracParams, y: float, kernel_value: float,
                       constant: Optional[float]) -> KernelDecomposition:
    params.require_fractional("decomposition")
    a, d = params.alpha, params.d
    log_tail, log_gauss = _log_terms(params, y)
    tail = math.exp(log_tail)
    gauss = math.exp(log_gauss)
    residual = kernel_value - tail - gauss
    bound = math.nan if constant is None else constant * (1 - a) / (math.pi * y ** (d + 4 * a))
    return KernelDecomposition(a, d, y, tail, gauss, kernel_value, residual, bound, log_gauss)


def _check_radius(x: float):
    if not x > 0 or not math.isfinite(x):
        raise DomainError(f"Radius must be positive and finite, got {x}")


def decompose_1d(params: FracParams, x: float, spec: QuadSpec = None) -> KernelDecomposition:
    """Decomposition of the 1D profile at x > 0"""
    params.require_dimension("decompose_1d", 1)
    params.require_fractional("decompose_1d")
    _check_radius(x)
    return _decompose_profile(params, x, kernel_profile_1d(params, x, spec), residual_constant(1))


def decompose_dd(params: FracParams, x: float, spec: QuadSpec = None, bessel: str = "jv") -> KernelDecomposition:
    """Decomposition of the d-dim profile (d >= 2) at radius x > 0"""
    if params.d < 2:
        raise DomainError("decompose_dd requires d >= 2")
    params.require_fractional("decompose_dd")
    _check_radius(x)
    kernel_value = kernel_profile_dd(params, x, spec, bessel=bessel)
    return _decompose_profile(params, x, kernel_value, residual_constant(params.d))


def decompose(params: FracParams, x: float, spec: QuadSpec = None) -> KernelDecomposition:
    return decompose_1d(params, x, spec) if params.d == 1 else decompose_dd(params, x, spec)


def decompose_spacetime(params: FracParams, x: float, t: float, spec: QuadSpec = None) -> KernelDecomposition:
    """
    Expansion of p(x, t) by self-similar scaling of the profile expansion:
    tail A t / x^(d+2a), gauss exp(-x^(2a)/(4t)) / ((4 pi t)^(d/2) x^(d(1-a))) (d = 1),
    bound C (1-a) t^2 / (pi x^(d+4a)).
    """
    _check_radius(x)
    if not t > 0 or not math.isfinite(t):
        raise DomainError(f"Time must be positive, got {t}")
    a, d = params.alpha, params.d
    y = x * t ** (-1.0 / (2 * a))
    profile = decompose(params, y, spec)
    scale = t ** (-d / (2 * a))
    tail = scale * profile.tail_term
    gauss = scale * profile.gauss_term
    kernel_value = scale * profile.kernel_value
    residual = kernel_value - tail - gauss
    return KernelDecomposition(a, d, x, tail, gauss, kernel_value, residual, scale * profile.bound,
                               profile.log_gauss_term + math.log(scale), t)


@dataclass
class AlphaResidualEntry:
    alpha: float
    r_alpha: Optional[float] = None
    x_at_sup: Optional[float] = None
    tail_slope: Optional[float] = None
    max_abs_residual: Optional[float] = None
    decompositions: List[KernelDecomposition] = field(default_factory=list)
    error: Optional[str] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "alpha": self.alpha,
            "r_alpha": self.r_alpha,
            "x_at_sup": self.x_at_sup,
            "tail_slope": self.tail_slope,
            "max_abs_residual": self.max_abs_residual,
            "error": self.error,
        }


@dataclass
class ResidualScalingReport:
    d: int
    x_range: Tuple[float, float]
    n_samples: int
    entries: List[AlphaResidualEntry]
    ratio_limit: float

    @property
    def r_values(self) -> Dict[float, float]:
        return {e.alpha: e.r_alpha for e in self.entries if e.r_alpha is not None}

    @property
    def ratio(self) -> Optional[float]:
        values = [v for v in self.r_values.values() if v > 0]
        if len(values) < 2:
            return None
        return max(values) / min(values)

    @property
    def passed(self) -> bool:
        failed = any(e.error for e in self.entries)
        ratio = self.ratio
        return not failed and (ratio is None or ratio <= self.ratio_limit)

    def rows(self) -> List[Tuple]:
        return [dec.to_row() for e in self.entries for dec in e.decompositions]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "d": self.d,
            "x_range": list(self.x_range),
            "n_samples": self.n_samples,
            "entries": [e.to_dict() for e in self.entries],
            "ratio": self.ratio,
            "ratio_limit": self.ratio_limit,
            "passed": self.passed,
        }


def _scan_alpha(alpha: float, d: int, xs: np.ndarray, constant: Optional[float],
                spec: QuadSpec = None) -> AlphaResidualEntry:
    entry = AlphaResidualEntry(alpha)
    try:
        params = FracParams(alpha, d)
        decs = [_decompose_profile(params, float(x), kernel_profile(params, float(x), spec), constant)
                for x in xs]
    except LabError as e:
        logger.error(f"Residual scan failed for alpha={alpha}: {e}", alpha=alpha)
        entry.error = f"{type(e).__name__}: {e}"
        return entry

    normalized = np.array([dec.normalized_residual for dec in decs])
    i = int(np.argmax(normalized))
    entry.decompositions = decs
    entry.r_alpha = float(normalized[i])
    entry.x_at_sup = float(xs[i])
    entry.max_abs_residual = float(max(abs(dec.residual) for dec in decs))

    last_decade = xs >= xs[-1] / 10.0
    usable = last_decade & (normalized > 0)
    if np.count_nonzero(usable) >= 3:
        entry.tail_slope = float(np.polyfit(np.log(xs[usable]), np.log(normalized[usable]), 1)[0])
    return entry


def residual_scaling_report(params: FracParams, alphas: Sequence[float], x_range: Sequence[float],
                            n_samples: int, spec: QuadSpec = None) -> ResidualScalingReport:
    """
    Empirical constant R_a = sup_x |residual| x^(d+4a) pi / (1-a) per alpha,
    on log-uniform radii. ``params`` supplies the dimension.
    """
    if not alphas:
        raise DomainError("At least one alpha is required")
    if any(not 0 < a < 1 for a in alphas):
        raise DomainError(f"All alphas must lie in (0, 1), got {list(alphas)}")
    x_lo, x_hi = float(x_range[0]), float(x_range[1])
    if x_lo < 1 or x_hi <= x_lo:
        raise DomainError(f"x_range must satisfy 1 <= x_lo < x_hi, got {list(x_range)}")
    if n_samples < 2:
        raise DomainError("n_samples must be at least 2")

    xs = np.geomspace(x_lo, x_hi, n_samples)
    constant = residual_constant(params.d)
    entries = [_scan_alpha(float(a), params.d, xs, constant, spec) for a in alphas]
    report = ResidualScalingReport(params.d, (x_lo, x_hi), n_samples, entries, settings.residual_ratio_limit)
    logger.info(f"Residual scaling d={params.d}: R={report.r_values} ratio={report.ratio}",
                ratio=report.ratio)
    return report


@lru_cache(maxsize=None)
def _calibrated_constant(d: int, alphas: Tuple[float, ...], x_range: Tuple[float, ...], n: int) -> float:
    xs = np.geomspace(x_range[0], x_range[1], n)
    sups = []
    for alpha in alphas:
        entry = _scan_alpha(alpha, d, xs, None)
        if entry.r_alpha is None:
            raise InvariantError(f"Residual calibration failed at alpha={alpha}: {entry.error}")
        sups.append(entry.r_alpha)
    constant = 2.0 * max(sups)
    logger.info(f"Calibrated residual constant C={constant!r} for d={d}", constant=constant)
    return constant


def residual_constant(d: int) -> float:
    """
    Constant C of the residual bound: the configured value, or twice the
    largest normalized residual over the reference alpha sweep.
    """
    if settings.residual_constant is not None:
        return settings.residual_constant
    return _calibrated_constant(d, tuple(settings.residual_calibration_alphas),
                                tuple(settings.residual_calibration_range),
                                settings.residual_calibration_samples)


@dataclass(frozen=True)
class TailLawFit:
    params: FracParams
    x_range: Tuple[float, float]
    exponent: float
    expected_exponent: float
    prefactor: float
    exact_prefactor: float
    assembled_prefactor: float

    @property
    def factor_vs_exact(self) -> float:
        return self.prefactor / self.exact_prefactor

    @property
    def factor_vs_assembled(self) -> float:
        """Multiplicative factor between the assembled constant and the data"""
        return self.prefactor / self.assembled_prefactor


def fit_tail_law(params: FracParams, x_range: Sequence[float] = (50.0, 500.0), n_samples: int = 16,
                 spec: QuadSpec = None) -> TailLawFit:
    """
    Log-log least squares of p_alpha on log-uniform radii. The exponent is
    free; the prefactor is fitted with the exponent held at -(d + 2a), which
    keeps it insensitive to the next expansion term.
    """
    params.require_fractional("fit_tail_law")
    xs = np.geomspace(float(x_range[0]), float(x_range[1]), n_samples)
    values = np.array([kernel_profile(params, float(x), spec) for x in xs])
    if np.any(values <= 0):
        raise InvariantError("Kernel values must be positive for a log-log fit")
    log_x, log_p = np.log(xs), np.log(values)
    slope, _ = np.polyfit(log_x, log_p, 1)
    expected = -(params.d + 2 * params.alpha)
    prefactor = float(np.exp(np.mean(log_p - expected * log_x)))
    fit = TailLawFit(params, (float(x_range[0]), float(x_range[1])), float(slope), expected, prefactor,
                     stable_tail_coefficient(params), assembled_tail_coefficient(params))
    logger.info(f"Tail law alpha={params.alpha} d={params.d}: exponent={fit.exponent:.4f} "
                f"prefactor={fit.prefactor:.6g} factor_vs_assembled={fit.factor_vs_assembled:.4f}")
    return fit


@dataclass(frozen=True)
class TransitionScales:
    """Critical radius and transition times for one (alpha, d)"""
    params: FracParams
    C_alpha: float
    xi_alpha: float
    tau_alpha: float
    tau_log: float

    def __post_init__(self):
        if self.xi_alpha < branch_start(self.params) * (1 - 1e-12):
            raise InvariantError("xi_alpha must lie on the decreasing branch")
        if self.tau_alpha != self.xi_alpha ** (2 * self.params.alpha) / 4:
            raise InvariantError("tau_alpha must equal xi_alpha^(2 alpha) / 4")

    @property
    def ratio(self) -> float:
        return self.tau_alpha / self.tau_log

    def to_dict(self) -> Dict[str, Any]:
        return {
            "alpha": self.params.alpha,
            "d": self.params.d,
            "C_alpha": self.C_alpha,
            "xi_alpha": self.xi_alpha,
            "tau_alpha": self.tau_alpha,
            "tau_log": self.tau_log,
            "ratio": self.ratio,
        }


def branch_start(params: FracParams) -> float:
    """Maximiser [2(d+2)]^(1/(2a)) of y^((d+2)a) exp(-y^(2a)/4)"""
    return (2.0 * (params.d + 2)) ** (1.0 / (2 * params.alpha))


def threshold_constant(params: FracParams) -> float:
    """C_alpha = 2/sqrt(pi) (d = 1) or 2^((d+1)/2) D_alpha alpha / sqrt(pi)"""
    if params.d == 1:
        return 2.0 / math.sqrt(math.pi)
    return 2.0 ** ((params.d + 1) / 2.0) * d_alpha(params) * params.alpha / math.sqrt(math.pi)


def _branch_log_profile(params: FracParams, y: float) -> float:
    return (params.d + 2) * params.alpha * math.log(y) - 0.25 * y ** (2 * params.alpha)


def _decreasing_branch_root(params: FracParams, log_target: float) -> Optional[float]:
    """
    Root of (d+2) a ln y - y^(2a)/4 = log_target for y beyond the maximiser,
    by bisection to 1e-12 relative. None when the target exceeds the maximum.
    """
    lo = branch_start(params)

    def f(y: float) -> float:
        return _branch_log_profile(params, y) - log_target

    peak = f(lo)
    if peak < 0:
        return None
    if peak == 0:
        return lo

    hi = 2.0 * lo
    while f(hi) > 0:
        hi *= 2.0
        if hi > 1e300:
            raise NoRootError("Could not bracket the critical radius")
    return optimize.bisect(f, lo, hi, xtol=1e-15 * lo, rtol=1e-12, maxiter=400)


def critical_radius(params: FracParams) -> TransitionScales:
    """xi_alpha from y^((d+2)a) exp(-y^(2a)/4) = C_alpha sin(a pi), solved in logs"""
    params.require_fractional("critical_radius")
    c_alpha = threshold_constant(params)
    target = c_alpha * math.sin(params.alpha * math.pi)
    xi = _decreasing_branch_root(params, math.log(target))
    if xi is None:
        raise NoRootError(
            f"C_alpha sin(alpha pi) = {target:.6g} exceeds the maximum of y^((d+2)a) exp(-y^(2a)/4)")
    tau = xi ** (2 * params.alpha) / 4
    tau_log = -math.log1p(-params.alpha)
    scales = TransitionScales(params, c_alpha, xi, tau, tau_log)
    logger.debug(f"Critical radius alpha={params.alpha} d={params.d}: xi={xi!r} tau={tau!r} "
                 f"ratio={scales.ratio:.4f}")
    return scales


@lru_cache(maxsize=256)
def regime_switch_radius(params: FracParams) -> float:
    """
    Self-similar radius beyond which the tail term exceeds the Gaussian-like
    term. Below the branch maximiser the answer is always Gaussian.
    """
    params.require_fractional("regime_switch_radius")
    log_target = math.log(assembled_tail_coefficient(params)) - math.log(gauss_coefficient(params))
    root = _decreasing_branch_root(params, log_target)
    return branch_start(params) if root is None else root


def dominant_regime(params: FracParams, x: float, t: float) -> Regime:
    """Dominant expansion term at the self-similar radius x t^(-1/(2a)); ties go Gaussian"""
    params.require_fractional("dominant_regime")
    _check_radius(x)
    if not t > 0:
        raise DomainError(f"Time must be positive, got {t}")
    y = x * t ** (-1.0 / (2 * params.alpha))
    if y <= regime_switch_radius(params) * (1 + 1e-12):
        return Regime.GAUSSIAN_DOMINANT
    return Regime.TAIL_DOMINANT
