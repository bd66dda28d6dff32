"""
Two-term expansion of the kernel, residual scaling, critical radius and the
regime classifier.
"""
import math

import allure
import numpy as np
import pytest

from src.core.exceptions import DomainError, InvariantError
from src.formats.schemas import SchemaValidator
from src.fractional.asymptotics import (
    KernelDecomposition,
    Regime,
    alpha_level,
    assembled_tail_coefficient,
    branch_start,
    critical_radius,
    decompose_1d,
    decompose_dd,
    decompose_spacetime,
    dominant_regime,
    regime_switch_radius,
    residual_scaling_report,
    stable_tail_coefficient,
    tail_normalization_ratio,
    threshold_constant,
)
from src.fractional.params import FracParams
from src.numerics.specfun import gamma_fn


@pytest.fixture
def fixed_residual_constant(override_settings):
    """Skip the lazy calibration sweep"""
    override_settings(residual_constant=1.0)


@allure.epic("Asymptotics")
@allure.feature("Decomposition")
@pytest.mark.usefixtures("fixed_residual_constant")
class TestDecomposition:

    @allure.title("Cauchy tail term")
    @pytest.mark.unit
    def test_cauchy_tail_term(self):
        dec = decompose_1d(FracParams(0.5), 10.0)
        assert dec.tail_term == pytest.approx(0.01 / math.pi, rel=1e-13)
        assert dec.bound == pytest.approx(0.5 / (math.pi * 10.0 ** 3), rel=1e-13)

    @pytest.mark.unit
    def test_gauss_term_near_classical_limit(self):
        dec = decompose_1d(FracParams(0.99), 1.0)
        assert dec.gauss_term == pytest.approx(math.exp(-0.25) / (2 * math.sqrt(math.pi)), rel=1e-13)

    @allure.title("Residual is the exact difference")
    @allure.severity(allure.severity_level.CRITICAL)
    @pytest.mark.unit
    @pytest.mark.parametrize("alpha,x", [(0.6, 2.0), (0.9, 30.0), (0.95, 7.5)])
    def test_residual_identity(self, alpha, x):
        dec = decompose_1d(FracParams(alpha), x)
        assert dec.residual == dec.kernel_value - dec.tail_term - dec.gauss_term
        assert dec.tail_term > 0 and dec.gauss_term >= 0

    @pytest.mark.unit
    def test_two_dimensional_terms(self):
        dec = decompose_dd(FracParams(0.5, 2), 20.0)
        assert dec.tail_term == pytest.approx(2 * (2 * math.pi) ** -1.5 * 20.0 ** -3, rel=1e-13)
        assert dec.residual == dec.kernel_value - dec.tail_term - dec.gauss_term

    @pytest.mark.unit
    def test_two_dimensional_gauss_term_classical_limit(self):
        dec = decompose_dd(FracParams(0.999999, 2), 2.0)
        assert dec.gauss_term == pytest.approx(math.exp(-1.0) / (4 * math.pi), rel=1e-4)

    @pytest.mark.unit
    def test_spacetime_scaling(self):
        params = FracParams(0.75)
        x, t = 12.0, 2.5
        dec = decompose_spacetime(params, x, t)
        assert dec.t == t
        assert dec.tail_term == pytest.approx(assembled_tail_coefficient(params) * t / x ** 2.5, rel=1e-12)
        expected_gauss = math.exp(-x ** 1.5 / (4 * t)) / ((4 * math.pi * t) ** 0.5 * x ** 0.25)
        assert dec.gauss_term == pytest.approx(expected_gauss, rel=1e-12)
        assert dec.bound == pytest.approx(0.25 * t ** 2 / (math.pi * x ** 4), rel=1e-12)

    @pytest.mark.unit
    def test_rejects_classical_and_bad_radius(self):
        with pytest.raises(DomainError):
            decompose_1d(FracParams(1.0), 2.0)
        with pytest.raises(DomainError):
            decompose_1d(FracParams(0.8), 0.0)
        with pytest.raises(DomainError):
            decompose_dd(FracParams(0.8), 2.0)

    @pytest.mark.unit
    def test_identity_is_enforced(self):
        with pytest.raises(InvariantError):
            KernelDecomposition(0.8, 1, 1.0, 0.1, 0.1, 0.3, 0.2, 0.0, math.log(0.1))


@allure.epic("Asymptotics")
@allure.feature("Tail Constants")
class TestTailConstants:

    @pytest.mark.unit
    @pytest.mark.parametrize("alpha", [0.55, 0.75, 0.95])
    def test_exact_constant_reduces_in_one_dimension(self, alpha):
        params = FracParams(alpha)
        expected = gamma_fn(2 * alpha + 1) * math.sin(alpha * math.pi) / math.pi
        assert stable_tail_coefficient(params) == pytest.approx(expected, rel=1e-12)
        assert tail_normalization_ratio(params) == pytest.approx(1.0, rel=1e-12)

    @pytest.mark.unit
    def test_assembled_constant_misses_in_two_dimensions(self):
        ratio = tail_normalization_ratio(FracParams(0.5, 2))
        assert ratio == pytest.approx(2 * (2 * math.pi) ** -1.5 * 2 * math.pi, rel=1e-12)
        assert ratio != pytest.approx(1.0, abs=0.1)

    @pytest.mark.unit
    def test_alpha_level(self):
        assert alpha_level(FracParams(0.75)) == pytest.approx(math.sin(0.75 * math.pi))
        assert alpha_level(FracParams(0.75), kappa=1.0) == pytest.approx(0.5)
        with pytest.raises(DomainError):
            alpha_level(FracParams(0.75), kappa=-1.0)


@allure.epic("Asymptotics")
@allure.feature("Residual Scaling")
@pytest.mark.usefixtures("fixed_residual_constant")
class TestResidualScaling:

    @allure.title("Per-alpha report with schema-valid JSON")
    @pytest.mark.unit
    def test_report(self):
        report = residual_scaling_report(FracParams(0.9), [0.9, 0.95], (1.0, 20.0), 8)
        assert [e.alpha for e in report.entries] == [0.9, 0.95]
        for entry in report.entries:
            assert entry.error is None
            assert math.isfinite(entry.r_alpha) and entry.r_alpha > 0
            assert 1.0 <= entry.x_at_sup <= 20.0
            assert len(entry.decompositions) == 8
        assert report.ratio == pytest.approx(max(report.r_values.values()) / min(report.r_values.values()))
        assert len(report.rows()) == 16
        assert SchemaValidator.validate("scaling_report", report.to_dict())["valid"]

    @pytest.mark.unit
    def test_half_order_runs(self):
        report = residual_scaling_report(FracParams(0.5), [0.5], (1.0, 100.0), 6)
        assert math.isfinite(report.entries[0].r_alpha)
        assert report.ratio is None
        assert report.passed

    @allure.title("Residual collapses as alpha -> 1")
    @pytest.mark.unit
    def test_residual_collapses_near_one(self):
        report = residual_scaling_report(FracParams(0.9), [1 - 1e-6], (1.0, 5.0), 6)
        entry = report.entries[0]
        assert math.isfinite(entry.r_alpha)
        assert entry.max_abs_residual <= 1e-5

    @pytest.mark.unit
    @pytest.mark.parametrize("alphas,x_range,n", [
        ([], (1.0, 10.0), 4),
        ([1.0], (1.0, 10.0), 4),
        ([0.9], (0.5, 10.0), 4),
        ([0.9], (10.0, 10.0), 4),
        ([0.9], (1.0, 10.0), 1),
    ])
    def test_rejects_bad_inputs(self, alphas, x_range, n):
        with pytest.raises(DomainError):
            residual_scaling_report(FracParams(0.9), alphas, x_range, n)


@allure.epic("Asymptotics")
@allure.feature("Transition Scales")
class TestCriticalRadius:

    @pytest.mark.unit
    def test_tau_log_values(self, reference_values):
        for case in reference_values["tau_log"]:
            scales = critical_radius(FracParams(case["alpha"]))
            assert scales.tau_log == pytest.approx(case["value"], rel=1e-12)

    @allure.title("Root satisfies the defining equation on the decreasing branch")
    @allure.severity(allure.severity_level.CRITICAL)
    @pytest.mark.unit
    @pytest.mark.parametrize("alpha,d", [(0.9, 1), (0.9, 2), (0.99, 3)])
    def test_defining_equation(self, alpha, d):
        params = FracParams(alpha, d)
        scales = critical_radius(params)
        y = scales.xi_alpha
        lhs = y ** ((d + 2) * alpha) * math.exp(-y ** (2 * alpha) / 4)
        rhs = threshold_constant(params) * math.sin(alpha * math.pi)
        assert lhs == pytest.approx(rhs, rel=1e-10)
        assert y >= branch_start(params)
        assert scales.tau_alpha == y ** (2 * alpha) / 4

    @pytest.mark.unit
    def test_threshold_constant_one_dimension(self):
        assert threshold_constant(FracParams(0.9)) == pytest.approx(2 / math.sqrt(math.pi))

    @pytest.mark.unit
    def test_ratio_approaches_one(self):
        ratios = [critical_radius(FracParams(1 - 10.0 ** -k)).ratio for k in (4, 8)]
        assert 0.8 <= ratios[0] <= 1.8
        assert abs(ratios[1] - 1) < abs(ratios[0] - 1)

    @pytest.mark.unit
    def test_tau_increases_with_alpha(self):
        taus = [critical_radius(FracParams(a)).tau_alpha for a in (0.91, 0.95, 0.99, 1 - 1e-4, 1 - 1e-8)]
        assert all(b > a for a, b in zip(taus, taus[1:]))

    @pytest.mark.unit
    def test_to_dict_matches_schema(self):
        data = critical_radius(FracParams(0.99)).to_dict()
        assert SchemaValidator.validate("transition_scales", data)["valid"]
        assert data["ratio"] == pytest.approx(data["tau_alpha"] / data["tau_log"])

    @pytest.mark.unit
    def test_requires_fractional_order(self):
        with pytest.raises(DomainError):
            critical_radius(FracParams(1.0))


@allure.epic("Asymptotics")
@allure.feature("Regime Classifier")
class TestDominantRegime:

    @pytest.mark.unit
    def test_examples(self):
        params = FracParams(0.99)
        t = 3.0
        xi = critical_radius(params).xi_alpha
        scale = t ** (1 / (2 * 0.99))
        assert dominant_regime(params, 0.5 * xi * scale, t) == Regime.GAUSSIAN_DOMINANT
        assert dominant_regime(params, 2.0 * xi * scale, t) == Regime.TAIL_DOMINANT

    @pytest.mark.unit
    def test_tie_goes_gaussian(self):
        params = FracParams(0.95)
        assert dominant_regime(params, regime_switch_radius(params), 1.0) == Regime.GAUSSIAN_DOMINANT

    @allure.title("Single crossing in x at fixed t")
    @pytest.mark.unit
    def test_single_crossing(self):
        params = FracParams(0.9)
        regimes = [dominant_regime(params, x, 2.0) for x in np.geomspace(0.01, 1e3, 200)]
        switches = sum(a != b for a, b in zip(regimes, regimes[1:]))
        assert regimes[0] == Regime.GAUSSIAN_DOMINANT
        assert regimes[-1] == Regime.TAIL_DOMINANT
        assert switches == 1

    @pytest.mark.unit
    @pytest.mark.parametrize("alpha,d", [(0.55, 1), (0.75, 1), (0.99, 1), (0.8, 2), (0.9, 3)])
    def test_bulk_is_gaussian(self, alpha, d):
        params = FracParams(alpha, d)
        start = branch_start(params)
        assert regime_switch_radius(params) >= start
        for y in np.linspace(0.05, 1.0, 6) * start:
            assert dominant_regime(params, y, 1.0) == Regime.GAUSSIAN_DOMINANT

    @pytest.mark.unit
    def test_bad_arguments(self):
        with pytest.raises(DomainError):
            dominant_regime(FracParams(0.9), -1.0, 1.0)
        with pytest.raises(DomainError):
            dominant_regime(FracParams(0.9), 1.0, 0.0)
