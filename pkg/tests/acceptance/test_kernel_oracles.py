"""
Kernel evaluation against closed forms, total mass, tail law and D_alpha.
"""
import math

import allure
import numpy as np
import pytest

from src.fractional.asymptotics import fit_tail_law, stable_tail_coefficient, tail_normalization_ratio
from src.fractional.kernel import kernel_mass, tabulate_kernel_quadrature, tabulate_kernel_spectral
from src.fractional.params import FracParams
from src.numerics.specfun import d_alpha, d_alpha_integral, d_alpha_integral_exact, d_alpha_ratio

CLOSED_FORMS = {
    0.5: lambda x: 1.0 / (math.pi * (1.0 + x * x)),
    1.0: lambda x: math.exp(-x * x / 4.0) / math.sqrt(4.0 * math.pi),
}
SPECTRAL_GRIDS = {0.5: (1000.0, 2 ** 15), 1.0: (50.0, 2 ** 12)}

pytestmark = [pytest.mark.acceptance, pytest.mark.slow]


@allure.epic("Acceptance")
@allure.feature("Kernel")
class TestKernelOracles:

    @allure.story("Closed forms")
    @allure.title("Quadrature path against Cauchy and Gaussian")
    @pytest.mark.parametrize("alpha", [0.5, 1.0])
    def test_quadrature_closed_forms(self, alpha, reference_values):
        xs = np.round(np.arange(0.0, 10.05, 0.1), 10)
        table = tabulate_kernel_quadrature(FracParams(alpha), 1.0, xs)
        exact = np.array([CLOSED_FORMS[alpha](x) for x in xs])
        limit = reference_values["acceptance"]["closed_form_quadrature_abs"]
        assert np.max(np.abs(table.values - exact)) <= limit

    @allure.story("Closed forms")
    @allure.title("Spectral path against Cauchy and Gaussian on |x| <= L/4")
    @pytest.mark.parametrize("alpha", [0.5, 1.0])
    def test_spectral_closed_forms(self, alpha, reference_values):
        L, N = SPECTRAL_GRIDS[alpha]
        table = tabulate_kernel_spectral(FracParams(alpha), 1.0, L, N)
        central = table.xs <= L / 4
        exact = np.array([CLOSED_FORMS[alpha](x) for x in table.xs[central]])
        limit = reference_values["acceptance"]["closed_form_spectral_abs"]
        assert np.max(np.abs(table.values[central] - exact)) <= limit

    @allure.story("Mass")
    @pytest.mark.parametrize("alpha", [0.55, 0.65, 0.75, 0.85, 0.95])
    def test_mass_one_dimension(self, alpha, reference_values):
        assert abs(kernel_mass(FracParams(alpha)) - 1.0) <= reference_values["tolerances"]["mass_1d"]

    @allure.story("Mass")
    @pytest.mark.parametrize("d", [2, 3])
    def test_mass_higher_dimensions(self, d, reference_values):
        assert abs(kernel_mass(FracParams(0.75, d)) - 1.0) <= reference_values["tolerances"]["mass_dd"]


@allure.epic("Acceptance")
@allure.feature("Tail Law")
class TestTailLaw:

    @allure.title("Log-log fit of the one-dimensional tail")
    @allure.severity(allure.severity_level.CRITICAL)
    @pytest.mark.parametrize("alpha", [0.55, 0.75, 0.95])
    def test_one_dimension(self, alpha, reference_values):
        limits = reference_values["acceptance"]
        fit = fit_tail_law(FracParams(alpha), (50.0, 500.0))
        assert abs(fit.exponent + 1 + 2 * alpha) <= limits["tail_exponent_tol"]
        expected = math.gamma(2 * alpha + 1) * math.sin(alpha * math.pi) / math.pi
        assert fit.prefactor == pytest.approx(expected, rel=limits["tail_prefactor_rel"])
        assert fit.factor_vs_assembled == pytest.approx(1.0, rel=limits["tail_prefactor_rel"])

    @allure.title("Two-dimensional tail: exact constant and the assembled factor")
    def test_two_dimensions(self, reference_values):
        params = FracParams(0.75, 2)
        fit = fit_tail_law(params, (50.0, 500.0))
        assert abs(fit.exponent + 2 + 1.5) <= reference_values["acceptance"]["tail_exponent_tol"]
        assert fit.exact_prefactor == stable_tail_coefficient(params)
        assert fit.factor_vs_exact == pytest.approx(1.0, rel=0.05)
        assert fit.factor_vs_assembled == pytest.approx(1.0 / tail_normalization_ratio(params), rel=0.05)


@allure.epic("Acceptance")
@allure.feature("D_alpha")
class TestDAlpha:

    @allure.title("Whittaker integral against its exact value")
    def test_identity(self, reference_values):
        tolerance = reference_values["tolerances"]["d_alpha_rel"]
        for alpha, d in reference_values["acceptance"]["d_alpha_cases"]:
            params = FracParams(alpha, d)
            integral = d_alpha_integral(params)
            assert integral == pytest.approx(d_alpha_integral_exact(params), rel=tolerance)
            assert integral / d_alpha(params) == pytest.approx(d_alpha_ratio(params), rel=tolerance)
