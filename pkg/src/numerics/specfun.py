"""
Special functions for the d-dimensional kernel expansion.

Gamma comes from ``scipy.special``. Bessel J and Whittaker W_{0,nu} are
evaluated from their integral representations by QUADPACK with algebraic
endpoint weights, which absorb the (1 - t^2)^(nu - 1/2) and t^(nu - 1/2)
singularities for nu < 1/2.
"""
import math
from dataclasses import dataclass
from typing import Union, TYPE_CHECKING

import numpy as np
from scipy import special

from src.core.exceptions import DomainError
from src.core.logger import LabLogger
from src.numerics.quadrature import QuadSpec, quad_checked

if TYPE_CHECKING:
    from src.fractional.params import FracParams

logger = LabLogger.get_logger(__name__)

# Special-function accuracy sits below every downstream tolerance
SPECFUN_SPEC = QuadSpec(abs_tol=1e-13, rel_tol=1e-13, max_subdivisions=2000)


@dataclass(frozen=True)
class NuOrder:
    """Real order nu > -1/2 of the Bessel and Whittaker functions"""
    nu: float

    def __post_init__(self):
        if not math.isfinite(self.nu) or self.nu <= -0.5:
            raise DomainError(f"Order nu must exceed -1/2, got {self.nu}")


OrderLike = Union[NuOrder, float, int]


def _order(nu: OrderLike) -> NuOrder:
    return nu if isinstance(nu, NuOrder) else NuOrder(float(nu))


def gamma_fn(x: float) -> float:
    """Gamma function on the positive axis"""
    if not x > 0 or not math.isfinite(x):
        raise DomainError(f"gamma_fn requires a positive finite argument, got {x}")
    return float(special.gamma(x))


def bessel_j(nu: OrderLike, z: float, spec: QuadSpec = SPECFUN_SPEC) -> float:
    """
    J_nu(z) from the Poisson integral

        (z/2)^nu / (Gamma(nu + 1/2) sqrt(pi)) * int_{-1}^{1} (1 - t^2)^(nu - 1/2) cos(z t) dt
    """
    order = _order(nu).nu
    if not z >= 0 or not math.isfinite(z):
        raise DomainError(f"bessel_j requires a finite z >= 0, got {z}")

    if z == 0.0:
        if order == 0.0:
            return 1.0
        return 0.0 if order > 0 else math.inf

    prefactor = (0.5 * z) ** order / (gamma_fn(order + 0.5) * math.sqrt(math.pi))
    power = order - 0.5
    scaled = QuadSpec(abs_tol=spec.abs_tol / max(prefactor, 1e-300), rel_tol=spec.rel_tol,
                      max_subdivisions=spec.max_subdivisions, max_zeros=spec.max_zeros,
                      gl_order=spec.gl_order)

    integral, _, _ = quad_checked(lambda t: math.cos(z * t), -1.0, 1.0, scaled, kind="bessel_j",
                                  weight="alg", wvar=(power, power))
    return prefactor * integral


def whittaker_w0(nu: OrderLike, z: float, spec: QuadSpec = SPECFUN_SPEC) -> float:
    """
    W_{0,nu}(z) for real z > 0 from

        e^(-z/2) / Gamma(nu + 1/2) * int_0^inf [t (1 + t/z)]^(nu - 1/2) e^(-t) dt

    split at t = 1; the head carries the t^(nu - 1/2) singularity as a weight.
    """
    order = _order(nu).nu
    if not z > 0 or not math.isfinite(z):
        raise DomainError(f"whittaker_w0 requires a positive finite z, got {z}")

    power = order - 0.5
    head, _, _ = quad_checked(lambda t: (1.0 + t / z) ** power * math.exp(-t), 0.0, 1.0, spec,
                              kind="whittaker_head", weight="alg", wvar=(power, 0.0))
    tail, _, _ = quad_checked(lambda t: (t * (1.0 + t / z)) ** power * math.exp(-t), 1.0, np.inf, spec,
                              kind="whittaker_tail")
    return math.exp(-0.5 * z) / gamma_fn(order + 0.5) * (head + tail)


def d_alpha(params: 'FracParams') -> float:
    """Closed form 2^(2a + d/2 - 2) Gamma(a + (d-1)/2) Gamma(a + 1/2)"""
    a, d = params.alpha, params.d
    return 2.0 ** (2 * a + 0.5 * d - 2) * gamma_fn(a + 0.5 * (d - 1)) * gamma_fn(a + 0.5)


def d_alpha_integral_exact(params: 'FracParams') -> float:
    """Exact value of the Whittaker-integral definition of D_alpha"""
    a, d = params.alpha, params.d
    return 2.0 ** (2 * a + 0.5 * (d + 1)) * gamma_fn(a + 1) * gamma_fn(a + 0.5 * d) / math.sqrt(math.pi)


def d_alpha_integral(params: 'FracParams', spec: QuadSpec = SPECFUN_SPEC) -> float:
    """
    D_alpha = int_0^inf u^s 2^(-s) W_{0, d/2 - 1}(u) du with s = 2a + (d-1)/2,
    by quadrature of ``whittaker_w0``.
    """
    s = 2 * params.alpha + 0.5 * (params.d - 1)
    order = NuOrder(0.5 * params.d - 1)
    outer = QuadSpec(abs_tol=1e-12, rel_tol=1e-10, max_subdivisions=spec.max_subdivisions)

    def integrand(u: float) -> float:
        if u == 0.0:
            return 0.0
        return (0.5 * u) ** s * whittaker_w0(order, u, spec)

    # Split where W decays like e^(-u/2); the tail is smooth
    split = 4.0 * (s + 1.0)
    head, _, _ = quad_checked(integrand, 0.0, split, outer, kind="d_alpha_head")
    tail, _, _ = quad_checked(integrand, split, np.inf, outer, kind="d_alpha_tail")
    value = head + tail
    logger.debug(f"D_alpha integral alpha={params.alpha} d={params.d}: {value!r}")
    return value


def d_alpha_ratio(params: 'FracParams') -> float:
    """Ratio of the Whittaker-integral D_alpha to the closed form"""
    a, d = params.alpha, params.d
    return (2.0 ** 2.5 * gamma_fn(a + 1) * gamma_fn(a + 0.5 * d)
            / (math.sqrt(math.pi) * gamma_fn(a + 0.5 * (d - 1)) * gamma_fn(a + 0.5)))


def sphere_area(d: int) -> float:
    """Area of the unit sphere S^(d-1) in R^d"""
    return 2.0 * math.pi ** (0.5 * d) / gamma_fn(0.5 * d)
