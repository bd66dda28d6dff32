"""
Fractional heat kernel p(x, t) = F^-1(exp(-|xi|^(2 alpha) t)).

Two evaluation paths:

* quadrature: pointwise, high accuracy. The 1D profile is a cosine
  transform summed between zeros; the d-dim profile is a Hankel-type
  integral split at Bessel zeros.
* spectral: the symbol sampled on the frequency lattice of the periodic
  box [-L, L)^d and inverted by FFT. Fast, but periodized.

alpha = 1 short-circuits to the closed-form Gaussian on the quadrature path.
"""
import math
import threading
from dataclasses import dataclass, field
from functools import lru_cache
from typing import List, Sequence, Tuple, Union

import numpy as np
from scipy import optimize, special
from scipy.integrate import trapezoid

from config.settings import settings
from src.core.exceptions import DomainError, InvariantError, ResolutionError
from src.core.logger import LabLogger
from src.fractional.params import FracParams
from src.numerics.quadrature import (
    QuadSpec,
    integrate_adaptive,
    integrate_alternating,
    integrate_oscillatory_cos,
    panel_integrals,
    quad_checked,
)
from src.numerics.specfun import bessel_j, gamma_fn, sphere_area

logger = LabLogger.get_logger(__name__)

# exp(-45) ~ 3e-20: the symbol is negligible past r^(2 alpha) = 45
CUTOFF_EXPONENT = 45.0
TAIL_SERIES_TERMS = 6
METHODS = ("quadrature", "spectral")


class ClampCounter:
    """Counts kernel values within the positivity tolerance clamped to zero"""

    def __init__(self):
        self._count = 0
        self._lock = threading.Lock()

    def add(self, n: int = 1):
        with self._lock:
            self._count += n

    @property
    def value(self) -> int:
        return self._count

    def reset(self):
        with self._lock:
            self._count = 0


clamp_counter = ClampCounter()


def _kernel_spec(spec: QuadSpec = None) -> QuadSpec:
    return spec or QuadSpec.from_settings()


def _clamp(value: float, where: str) -> float:
    if value >= 0.0:
        return value
    if value >= -settings.positivity_tol:
        clamp_counter.add()
        return 0.0
    raise InvariantError(f"Negative kernel value {value!r} at {where}")


def symbol_cutoff(alpha: float) -> float:
    """Radius where exp(-r^(2 alpha)) drops below exp(-CUTOFF_EXPONENT)"""
    return CUTOFF_EXPONENT ** (1.0 / (2.0 * alpha))


def gaussian_profile(d: int, r: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
    """Classical heat kernel at t = 1"""
    return (4.0 * math.pi) ** (-0.5 * d) * np.exp(-0.25 * np.square(r))


def kernel_at_zero(params: FracParams) -> float:
    """p_alpha(0); the d = 1 branch coincides with the general formula"""
    a, d = params.alpha, params.d
    if d == 1:
        return gamma_fn(1.0 / (2.0 * a) + 1.0) / math.pi
    return (2.0 * math.pi) ** (-d) * sphere_area(d) * gamma_fn(d / (2.0 * a)) / (2.0 * a)


def lipschitz_constant(params: FracParams) -> float:
    """Constant K with |p_alpha(x) - p_alpha(0)| <= K |x|"""
    a, d = params.alpha, params.d
    if d == 1:
        return gamma_fn(1.0 / a + 1.0) / (2.0 * math.pi)
    return gamma_fn((d + 1) / (2.0 * a)) / (2.0 * a * (2.0 * math.pi) ** d)


def tail_series_coefficient(params: FracParams, n: int) -> float:
    """
    Coefficient a_n of the large-radius expansion
    p_alpha(r) ~ sum_n a_n r^(-d - 2 alpha n).
    """
    a, d = params.alpha, params.d
    sign = 1.0 if n % 2 == 1 else -1.0
    return (sign * 2.0 ** (2 * a * n) * gamma_fn(a * n + 0.5 * d) * gamma_fn(a * n + 1.0)
            * math.sin(n * a * math.pi) / (math.pi ** (0.5 * d + 1.0) * math.factorial(n)))


def kernel_profile_1d(params: FracParams, x: float, spec: QuadSpec = None) -> float:
    """p_alpha(x) = (1/pi) int_0^inf exp(-r^(2 alpha)) cos(r |x|) dr"""
    params.require_dimension("kernel_profile_1d", 1)
    if not math.isfinite(x):
        raise DomainError(f"x must be finite, got {x}")
    ax = abs(x)

    if params.is_gaussian:
        return float(gaussian_profile(1, ax))
    if ax == 0.0:
        return kernel_at_zero(params)

    two_alpha = 2.0 * params.alpha

    def symbol(r):
        return np.exp(-np.power(r, two_alpha))

    value = integrate_oscillatory_cos(symbol, ax, _kernel_spec(spec), cutoff=symbol_cutoff(params.alpha))
    return _clamp(value / math.pi, f"x={x!r}")


@lru_cache(maxsize=None)
def bessel_zero(nu: float, k: int) -> float:
    """k-th positive zero of J_nu: McMahon guess refined by Brent's method"""
    lo = (k + 0.5 * nu - 0.75) * math.pi
    hi = (k + 0.5 * nu + 0.25) * math.pi
    lo = max(lo, 1e-6)

    def j(z):
        return special.jv(nu, z)

    if j(lo) * j(hi) > 0:
        # McMahon is loose for small k and large nu; scan for the sign change
        grid = np.linspace(max(lo - math.pi, 1e-6), hi + math.pi, 257)
        values = special.jv(nu, grid)
        previous = bessel_zero(nu, k - 1) if k > 1 else 0.0
        changes = [i for i in range(len(grid) - 1)
                   if values[i] * values[i + 1] <= 0 and grid[i + 1] > previous + 1e-9]
        if not changes:
            raise DomainError(f"No bracket for zero {k} of J_{nu}")
        lo, hi = grid[changes[0]], grid[changes[0] + 1]

    return optimize.brentq(j, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps)


def bessel_zeros(nu: float, first: int, last: int) -> np.ndarray:
    """Zeros j_{nu,first} .. j_{nu,last} inclusive"""
    return np.array([bessel_zero(nu, k) for k in range(first, last + 1)])


def kernel_profile_dd(params: FracParams, r: float, spec: QuadSpec = None, bessel: str = "jv") -> float:
    """
    p_alpha(r) = (2 pi)^(-d/2) r^(1 - d/2) int_0^inf exp(-rho^(2 alpha)) J_{d/2-1}(r rho) rho^(d/2) drho

    ``bessel="jv"`` uses ``scipy.special.jv`` on the panels; ``"integral"``
    uses the Poisson-integral ``bessel_j`` (slow reference path).
    """
    if params.d < 2:
        raise DomainError("kernel_profile_dd requires d >= 2")
    if not r >= 0 or not math.isfinite(r):
        raise DomainError(f"Radius must be finite and nonnegative, got {r}")
    if bessel not in ("jv", "integral"):
        raise DomainError(f"Unknown Bessel evaluation '{bessel}'")

    if params.is_gaussian:
        return float(gaussian_profile(params.d, r))
    if r == 0.0:
        return kernel_at_zero(params)

    spec = _kernel_spec(spec)
    d, nu = params.d, params.nu
    two_alpha = 2.0 * params.alpha
    half_d = 0.5 * d

    if bessel == "jv":
        def jfun(z):
            return special.jv(nu, z)
    else:
        jfun = np.vectorize(lambda z: bessel_j(nu, float(z)))

    def integrand(rho):
        return np.exp(-np.power(rho, two_alpha)) * jfun(r * rho) * np.power(rho, half_d)

    def scalar_integrand(rho: float) -> float:
        return float(integrand(np.asarray(rho)))

    cutoff = symbol_cutoff(params.alpha)
    first_zero = bessel_zero(nu, 1) / r

    if first_zero >= cutoff:
        inner, _, _ = quad_checked(scalar_integrand, 0.0, cutoff, spec, kind="hankel_head")
    else:
        head, _, _ = quad_checked(scalar_integrand, 0.0, first_zero, spec, kind="hankel_head")

        def terms(k0: int, k1: int) -> np.ndarray:
            edges = bessel_zeros(nu, k0 + 1, k1 + 1) / r
            return panel_integrals(integrand, edges, spec.gl_order)

        max_panels = max(1, int(math.ceil(r * cutoff / math.pi - 0.5 * nu + 0.25)))
        result = integrate_alternating(terms, head, spec, max_panels=max_panels,
                                       require_decreasing=False, kind="hankel")
        inner = result.value

    value = (2.0 * math.pi) ** (-half_d) * r ** (1.0 - half_d) * inner
    return _clamp(value, f"r={r!r}")


def kernel_profile(params: FracParams, r: float, spec: QuadSpec = None) -> float:
    """Radial profile p_alpha(r) in any dimension"""
    if params.d == 1:
        return kernel_profile_1d(params, r, spec)
    return kernel_profile_dd(params, abs(r), spec)


def _radius(params: FracParams, x) -> float:
    arr = np.atleast_1d(np.asarray(x, dtype=float))
    if arr.size == 1:
        return float(abs(arr[0]))
    if arr.size != params.d:
        raise DomainError(f"Point has {arr.size} components, expected d = {params.d}")
    return float(np.linalg.norm(arr))


def kernel_spacetime(params: FracParams, x, t: float, spec: QuadSpec = None) -> float:
    """p(x, t) = t^(-d/(2 alpha)) p_alpha(|x| t^(-1/(2 alpha)))"""
    if not t > 0 or not math.isfinite(t):
        raise DomainError(f"Time must be positive, got {t}")
    radius = _radius(params, x)
    scale = t ** (-1.0 / (2.0 * params.alpha))
    return t ** (-params.d / (2.0 * params.alpha)) * kernel_profile(params, radius * scale, spec)


def kernel_mass(params: FracParams, split: float = 50.0, spec: QuadSpec = None) -> float:
    """
    S_{d-1} int_0^inf p_alpha(r) r^(d-1) dr: adaptive quadrature on
    [0, split] plus the integrated large-radius series beyond it.
    """
    d = params.d
    area = sphere_area(d)
    outer = QuadSpec(abs_tol=1e-12, rel_tol=1e-11, max_subdivisions=500)

    def integrand(r: float) -> float:
        return kernel_profile(params, r, spec) * r ** (d - 1)

    head, _ = integrate_adaptive(integrand, 0.0, split, outer)
    if params.is_gaussian:
        tail, _ = integrate_adaptive(integrand, split, np.inf, outer)
        return area * (head + tail)

    tail = sum(tail_series_coefficient(params, n) * split ** (-2 * params.alpha * n) / (2 * params.alpha * n)
               for n in range(1, TAIL_SERIES_TERMS + 1))
    return area * (head + tail)


@dataclass(frozen=True)
class KernelTable:
    """Radial samples of p(., t); immutable once built"""
    params: FracParams
    t: float
    xs: np.ndarray
    values: np.ndarray
    method: str
    clamped: int = 0
    dense: bool = False

    def __post_init__(self):
        xs = np.array(self.xs, dtype=float)
        values = np.array(self.values, dtype=float)
        xs.setflags(write=False)
        values.setflags(write=False)
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "values", values)

        if self.method not in METHODS:
            raise DomainError(f"Unknown kernel method '{self.method}'")
        if xs.ndim != 1 or xs.shape != values.shape or xs.size == 0:
            raise DomainError("xs and values must be matching nonempty 1-D arrays")
        if xs[0] < 0 or np.any(np.diff(xs) <= 0):
            raise DomainError("xs must be strictly increasing nonnegative radii")
        self.validate()

    def mass(self) -> float:
        """
        Trapezoidal mass of the d-dim density over the tabulated radii.
        Only meaningful for dense tabulations; a handful of scattered radii
        overestimates it.
        """
        d = self.params.d
        return sphere_area(d) * float(trapezoid(self.values * self.xs ** (d - 1), self.xs))

    def validate(self, monotone_tol: float = 1e-12, mass_tol: float = 1e-6):
        if np.any(self.values < 0):
            raise InvariantError("Kernel table has negative values")
        rises = np.diff(self.values)
        if np.any(rises > monotone_tol):
            i = int(np.argmax(rises))
            raise InvariantError(f"Kernel table not radially nonincreasing near x={self.xs[i]!r}")
        if not self.dense:
            return
        mass = self.mass()
        if mass > 1.0 + mass_tol:
            raise InvariantError(f"Kernel table mass {mass!r} exceeds 1")

    def to_rows(self) -> List[Tuple]:
        return [(float(x), float(p), self.method, self.params.alpha, self.params.d, self.t)
                for x, p in zip(self.xs, self.values)]


def _check_grid(params: FracParams, t: float, L: float, N: int):
    if not t > 0 or not L > 0:
        raise DomainError(f"t and L must be positive, got t={t}, L={L}")
    if N <= 0 or N & (N - 1):
        raise DomainError(f"N must be a power of two, got {N}")
    minimum = 2 ** 10 if params.d == 1 else 2 ** 6
    if N < minimum:
        raise DomainError(f"N must be at least {minimum} for d = {params.d}, got {N}")
    if N ** params.d > 2 ** 24:
        raise DomainError(f"N^d = {N ** params.d} grid points is too large")
    nyquist = math.pi * N / (2.0 * L)
    decay = math.exp(-(nyquist ** (2.0 * params.alpha)) * t)
    if decay >= settings.symbol_decay_tol:
        raise ResolutionError(
            f"Symbol exp(-(pi N/(2L))^(2 alpha) t) = {decay:.3g} at Nyquist is not below "
            f"{settings.symbol_decay_tol:g}; increase N or reduce L")


def _axis_symbol(params: FracParams, t: float, L: float, N: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    Fourier coefficients of the kernel along the first axis, x = (x1, 0, ..., 0):
    the symbol summed over every other frequency axis, on the nonnegative
    first-axis frequencies (rfft layout).
    """
    h = 2.0 * L / N
    k1 = 2.0 * math.pi * np.fft.rfftfreq(N, h)
    a = params.alpha
    if params.d == 1:
        return k1, np.exp(-np.power(k1, 2.0 * a) * t)

    axis = 2.0 * math.pi * np.fft.fftfreq(N, h)
    rest = np.zeros(1)
    for _ in range(params.d - 1):
        rest = (rest[:, None] + axis[None, :] ** 2).ravel()

    coeffs = np.empty_like(k1)
    chunk = max(1, 2 ** 20 // rest.size)
    for start in range(0, k1.size, chunk):
        rows = k1[start:start + chunk]
        coeffs[start:start + chunk] = np.exp(
            -np.power(rows[:, None] ** 2 + rest[None, :], a) * t).sum(axis=1)
    return k1, coeffs


def spectral_kernel_grid(params: FracParams, t: float, L: float, N: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    Periodized kernel along the first axis on the full grid x_j = j h,
    j = 0..N-1 (FFT ordering; x_j >= L stands for x_j - 2L).
    """
    _check_grid(params, t, L, N)
    _, coeffs = _axis_symbol(params, t, L, N)
    values = np.fft.irfft(coeffs, n=N) * N / (2.0 * L) ** params.d
    x = (2.0 * L / N) * np.arange(N)
    return x, values


def _clamp_spectral(values: np.ndarray) -> Tuple[np.ndarray, int]:
    values = np.array(values, dtype=float)
    if np.any(values < -settings.positivity_tol):
        raise InvariantError(f"Spectral kernel minimum {values.min()!r} below positivity tolerance")
    negative = values < 0
    clamped = int(np.count_nonzero(negative))
    if clamped:
        clamp_counter.add(clamped)
        values[negative] = 0.0
    return values, clamped


def tabulate_kernel_spectral(params: FracParams, t: float, L: float, N: int) -> KernelTable:
    """KernelTable on radii 0, h, ..., L - h from one inverse FFT"""
    _, values = spectral_kernel_grid(params, t, L, N)
    half, clamped = _clamp_spectral(values[:N // 2])
    xs = (2.0 * L / N) * np.arange(N // 2)

    logger.debug(f"Spectral kernel alpha={params.alpha} d={params.d} t={t} L={L} N={N}: "
                 f"{clamped} values clamped")
    return KernelTable(params, t, xs, half, "spectral", clamped, dense=params.d == 1)


def tabulate_kernel_spectral_at(params: FracParams, t: float, L: float, N: int,
                                xs: Sequence[float]) -> KernelTable:
    """KernelTable at chosen radii from the trigonometric interpolant"""
    values, clamped = _clamp_spectral(evaluate_kernel_spectral(params, t, L, N, xs))
    return KernelTable(params, t, np.asarray(xs, dtype=float), values, "spectral", clamped)


def evaluate_kernel_spectral(params: FracParams, t: float, L: float, N: int,
                             xs: Sequence[float]) -> np.ndarray:
    """Trigonometric interpolant of the spectral kernel at arbitrary radii"""
    _check_grid(params, t, L, N)
    k1, coeffs = _axis_symbol(params, t, L, N)
    weights = np.full(k1.size, 2.0)
    weights[0] = 1.0
    weights[-1] = 1.0
    radii = np.abs(np.asarray(xs, dtype=float))
    return (np.cos(np.outer(radii, k1)) @ (weights * coeffs)) / (2.0 * L) ** params.d


def tabulate_kernel_quadrature(params: FracParams, t: float, xs: Sequence[float],
                               spec: QuadSpec = None) -> KernelTable:
    """KernelTable by pointwise quadrature (slow oracle path)"""
    before = clamp_counter.value
    values = [kernel_spacetime(params, x, t, spec) for x in xs]
    return KernelTable(params, t, np.asarray(xs, dtype=float), np.asarray(values),
                       "quadrature", clamp_counter.value - before)


@dataclass(frozen=True)
class KernelCrossValidation:
    """Pointwise comparison of the spectral and quadrature paths"""
    params: FracParams
    t: float
    L: float
    N: int
    xs: np.ndarray
    spectral: np.ndarray
    quadrature: np.ndarray
    max_discrepancy: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "max_discrepancy",
                           float(np.max(np.abs(np.asarray(self.spectral) - np.asarray(self.quadrature)))))


def cross_validate_kernel(params: FracParams, t: float, L: float, N: int, xs: Sequence[float],
                          spec: QuadSpec = None) -> KernelCrossValidation:
    """Evaluate both paths at ``xs`` and report the largest discrepancy"""
    radii = np.abs(np.asarray(xs, dtype=float))
    if np.any(radii > L / 4):
        logger.warning(f"Cross-validation radii beyond L/4 = {L / 4} include periodization error")
    spectral = evaluate_kernel_spectral(params, t, L, N, radii)
    quadrature = np.array([kernel_spacetime(params, x, t, spec) for x in radii])
    result = KernelCrossValidation(params, t, L, N, radii, spectral, quadrature)
    logger.info(f"Kernel cross-validation alpha={params.alpha} d={params.d}: "
                f"max discrepancy {result.max_discrepancy:.3g}",
                max_discrepancy=result.max_discrepancy)
    return result
