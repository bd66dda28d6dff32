"""
Numerical integration engines.

``integrate_adaptive`` wraps QUADPACK (``scipy.integrate.quad``) with an
explicit tolerance contract. ``integrate_oscillatory_cos`` sums
``int_0^inf g(r) cos(omega r) dr`` panel by panel between the zeros of the
cosine and accelerates the resulting alternating series. The same series
engine (``integrate_alternating``) serves any splitting at sign changes,
for example Bessel zeros.

Integrands passed to the panel engines must be vectorized over numpy arrays
and reentrant.
"""
import math
from collections import deque
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Optional, Tuple, Sequence

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy import integrate

from config.settings import settings
from src.core.exceptions import (
    DomainError,
    NonConvergenceError,
    AccelerationStagnationError,
)
from src.core.logger import LabLogger

logger = LabLogger.get_logger(__name__)

EULER_DEPTH = 30
WYNN_DEPTH = 40
STALL_LIMIT = 5
GROWTH_LIMIT = 3


@dataclass(frozen=True)
class QuadSpec:
    """Tolerances and budgets for one integration"""
    abs_tol: float = 1e-12
    rel_tol: float = 1e-10
    max_subdivisions: int = 200
    max_zeros: int = 20000
    gl_order: int = 20

    def __post_init__(self):
        if self.abs_tol < 0 or self.rel_tol < 0:
            raise DomainError("Tolerances must be nonnegative")
        if self.abs_tol + self.rel_tol <= 0:
            raise DomainError("abs_tol + rel_tol must be positive")
        if self.max_subdivisions < 8:
            raise DomainError(f"max_subdivisions must be >= 8, got {self.max_subdivisions}")
        if self.max_zeros < 16:
            raise DomainError(f"max_zeros must be >= 16, got {self.max_zeros}")
        if self.gl_order < 15:
            raise DomainError(f"gl_order must be >= 15, got {self.gl_order}")

    @classmethod
    def from_settings(cls, **overrides) -> 'QuadSpec':
        values = {
            "abs_tol": settings.quad_abs_tol,
            "rel_tol": settings.quad_rel_tol,
            "max_subdivisions": settings.quad_max_subdivisions,
            "max_zeros": settings.quad_max_zeros,
            "gl_order": settings.gauss_legendre_order,
        }
        values.update(overrides)
        return cls(**values)

    def tolerance(self, value: float) -> float:
        return max(self.abs_tol, self.rel_tol * abs(value))

    def halved(self) -> 'QuadSpec':
        return QuadSpec(self.abs_tol / 2, self.rel_tol / 2, self.max_subdivisions,
                        self.max_zeros, self.gl_order)


@dataclass(frozen=True)
class AlternatingSum:
    """Outcome of an accelerated alternating series"""
    value: float
    err_est: float
    n_panels: int
    method: str


def quad_checked(f: Callable[[float], float], a: float, b: float, spec: QuadSpec,
                 kind: str = "quad", **quad_kwargs) -> Tuple[float, float, int]:
    """
    Run ``scipy.integrate.quad`` and enforce the tolerance contract.

    QUADPACK warnings are accepted when the reported error estimate still
    meets ``spec``; otherwise ``NonConvergenceError`` carries the best value.
    Returns (value, err_est, evaluations).
    """
    result = integrate.quad(f, a, b, epsabs=spec.abs_tol, epsrel=spec.rel_tol,
                            limit=spec.max_subdivisions, full_output=1, **quad_kwargs)
    value, err_est, info = float(result[0]), float(result[1]), result[2]
    flagged = len(result) > 3
    evaluations = int(info.get("neval", 0)) if isinstance(info, dict) else 0

    if not math.isfinite(value):
        raise NonConvergenceError(f"{kind}: non-finite integral on [{a}, {b}]", value, err_est)

    if flagged and err_est > spec.tolerance(value):
        raise NonConvergenceError(f"{kind}: {str(result[3]).strip().splitlines()[0]}", value, err_est)

    logger.log_quadrature(kind, value, err_est, evaluations)
    return value, err_est, evaluations


def integrate_adaptive(f: Callable[[float], float], a: float, b: float,
                       spec: Optional[QuadSpec] = None) -> Tuple[float, float]:
    """
    Adaptive integration on [a, b]; ``b`` may be ``numpy.inf``.

    The semi-infinite case goes through QUADPACK's own mapping of [a, inf)
    onto a finite interval.
    """
    spec = spec or QuadSpec.from_settings()
    if math.isnan(a) or math.isnan(b):
        raise DomainError("Integration limits must not be NaN")
    if math.isinf(a):
        raise DomainError("Lower integration limit must be finite")
    if b == a:
        return 0.0, 0.0

    value, err_est, _ = quad_checked(f, a, b, spec, kind="adaptive")
    return value, err_est


@lru_cache(maxsize=8)
def gauss_legendre(order: int) -> Tuple[np.ndarray, np.ndarray]:
    nodes, weights = leggauss(order)
    return nodes, weights


def panel_integrals(f: Callable[[np.ndarray], np.ndarray], edges: np.ndarray, order: int) -> np.ndarray:
    """Fixed-order Gauss-Legendre integral of ``f`` over each [edges[i], edges[i+1]]"""
    nodes, weights = gauss_legendre(order)
    left, right = edges[:-1], edges[1:]
    mid = 0.5 * (left + right)
    half = 0.5 * (right - left)
    points = mid[:, None] + half[:, None] * nodes[None, :]
    return half * (f(points) @ weights)


def euler_average(partial_sums: Sequence[float]) -> float:
    """Euler transform of a run of partial sums by repeated averaging"""
    s = np.asarray(partial_sums, dtype=float)
    while s.size > 1:
        s = 0.5 * (s[1:] + s[:-1])
    return float(s[0])


def wynn_epsilon(partial_sums: Sequence[float]) -> float:
    """Wynn epsilon algorithm; returns the deepest finite even-column estimate"""
    s = np.asarray(partial_sums, dtype=float)
    best = float(s[-1])
    previous = np.zeros(s.size + 1)
    current = s.copy()
    column = 0
    while current.size > 1:
        diff = current[1:] - current[:-1]
        if np.any(diff == 0.0):
            break
        following = previous[1:current.size] + 1.0 / diff
        if not np.all(np.isfinite(following)):
            break
        previous, current = current, following
        column += 1
        if column % 2 == 0:
            best = float(current[-1])
    return best


def integrate_alternating(panel_terms: Callable[[int, int], np.ndarray], head: float,
                          spec: QuadSpec, max_panels: Optional[int] = None,
                          require_decreasing: bool = True, kind: str = "alternating") -> AlternatingSum:
    """
    Sum ``head + sum_k panel_terms(k)`` for an alternating sequence of panels.

    ``panel_terms(k0, k1)`` returns the integrals over panels k0..k1-1.
    The loop stops directly once a term falls under tolerance (alternating
    series bound), otherwise accepts an Euler-transformed estimate after two
    consecutive changes under tolerance. After ``STALL_LIMIT`` stalled Euler
    estimates it switches to the Wynn epsilon algorithm.

    When ``max_panels`` is given the integrand is negligible beyond that
    panel and the plain sum up to it is returned.
    """
    budget = spec.max_zeros if max_panels is None else min(max_panels, spec.max_zeros)
    total = head
    partial = deque(maxlen=EULER_DEPTH)
    partial_wynn = deque(maxlen=WYNN_DEPTH)
    method = "euler"
    last_estimate = None
    last_change = math.inf
    accepted = 0
    stalls = 0
    growth = 0
    previous_magnitude = math.inf
    last_magnitude = math.inf
    k = 0
    batch = 16

    while k < budget:
        terms = panel_terms(k, min(k + batch, budget))
        batch = min(2 * batch, 256)

        for term in terms:
            term = float(term)
            magnitude = abs(term)
            if require_decreasing:
                if magnitude > previous_magnitude * (1 + 1e-9) + 1e-300:
                    growth += 1
                    if growth >= GROWTH_LIMIT:
                        raise AccelerationStagnationError(
                            f"{kind}: alternating terms grow at panel {k}", value=total)
                else:
                    growth = 0
            previous_magnitude = magnitude
            last_magnitude = magnitude

            total += term
            k += 1
            partial.append(total)
            partial_wynn.append(total)
            tolerance = spec.tolerance(total)

            if magnitude <= tolerance and (k > 1 or head != 0.0):
                return AlternatingSum(total, magnitude, k, "direct")

            if len(partial) < 4:
                continue

            estimate = euler_average(partial) if method == "euler" else wynn_epsilon(partial_wynn)
            if last_estimate is not None:
                change = abs(estimate - last_estimate)
                if change <= tolerance:
                    accepted += 1
                    if accepted >= 2:
                        return AlternatingSum(estimate, change, k, method)
                else:
                    accepted = 0
                    stalls = stalls + 1 if change >= last_change else 0
                    if stalls >= STALL_LIMIT and method == "euler":
                        logger.debug(f"{kind}: Euler transform stalled at panel {k}, switching to epsilon")
                        method = "epsilon"
                        stalls = 0
                        estimate = wynn_epsilon(partial_wynn)
                last_change = change
            last_estimate = estimate

        if len(terms) == 0:
            break

    if max_panels is not None and k >= max_panels:
        return AlternatingSum(total, last_magnitude, k, "truncated")

    raise AccelerationStagnationError(
        f"{kind}: no convergence after {k} panels", value=last_estimate)


def integrate_oscillatory_cos(g: Callable[[np.ndarray], np.ndarray], omega: float,
                              spec: Optional[QuadSpec] = None,
                              cutoff: Optional[float] = None) -> float:
    """
    Compute ``int_0^inf g(r) cos(omega r) dr`` for positive, eventually
    monotone ``g``.

    The head panel [0, pi/(2 omega)] goes through QUADPACK's cosine-weighted
    rule, so ``g`` may be non-smooth at the origin. Every later panel lies
    between consecutive zeros and uses fixed-order Gauss-Legendre.
    ``cutoff`` marks the radius past which ``g`` is negligible.
    """
    spec = spec or QuadSpec.from_settings()
    if not omega > 0 or not math.isfinite(omega):
        raise DomainError(f"omega must be positive and finite, got {omega}")

    first_zero = 0.5 * math.pi / omega
    if cutoff is not None and first_zero >= cutoff:
        value, _, _ = quad_checked(g, 0.0, cutoff, spec, kind="oscillatory_head",
                                   weight="cos", wvar=omega)
        return value

    head, _, _ = quad_checked(g, 0.0, first_zero, spec, kind="oscillatory_head",
                              weight="cos", wvar=omega)
    period = math.pi / omega

    def integrand(r: np.ndarray) -> np.ndarray:
        return g(r) * np.cos(omega * r)

    def terms(k0: int, k1: int) -> np.ndarray:
        edges = first_zero + period * np.arange(k0, k1 + 1, dtype=float)
        return panel_integrals(integrand, edges, spec.gl_order)

    max_panels = None
    if cutoff is not None:
        max_panels = int(math.ceil((cutoff - first_zero) / period))

    result = integrate_alternating(terms, head, spec, max_panels=max_panels, kind="oscillatory_cos")
    logger.log_quadrature(f"oscillatory_cos[{result.method}]", result.value, result.err_est, result.n_panels)
    return result.value
