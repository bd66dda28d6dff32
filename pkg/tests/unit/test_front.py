"""
Front extraction and regime fits on synthetic traces and fields.
"""
import math

import allure
import numpy as np
import pytest

from src.core.exceptions import DegenerateFitError, DomainError, InsufficientSamplesError, InvariantError
from src.dynamics.front import (
    FrontRecorder,
    FrontTrace,
    crossing_position,
    extract_front,
    fit_regimes,
    linear_envelope_gap,
    trace_front,
)
from src.dynamics.solver import FieldState, SolverConfig
from src.formats.schemas import SchemaValidator
from src.fractional.params import FracParams


def synthetic_trace(position, times, side="right", origin=0.0) -> FrontTrace:
    return FrontTrace(0.5, side, [(t, position(t)) for t in times], origin=origin)


@pytest.fixture
def config():
    return SolverConfig(FracParams(0.9), 100.0, 4096, 0.05, 1.0)


@allure.epic("Fronts")
@allure.feature("Crossings")
class TestCrossings:

    @pytest.mark.unit
    def test_step(self):
        x = np.array([0.0, 1.0, 2.0, 3.0])
        assert crossing_position(x, np.array([1.0, 1.0, 0.0, 0.0]), 0.5) == 1.5
        assert crossing_position(x, np.array([0.0, 0.0, 1.0, 1.0]), 0.5, side="left") == 1.5

    @pytest.mark.unit
    def test_no_crossing(self):
        x = np.linspace(0.0, 1.0, 11)
        assert crossing_position(x, np.full(11, 0.2), 0.5) is None

    @pytest.mark.unit
    def test_outermost_crossing(self):
        x = np.arange(6, dtype=float)
        u = np.array([1.0, 0.0, 1.0, 1.0, 0.0, 0.0])
        assert crossing_position(x, u, 0.5) == 3.5

    @pytest.mark.unit
    def test_linear_profile_is_exact(self):
        x = np.linspace(0.0, 10.0, 101)
        u = np.clip(1.0 - x / 10.0, 0.0, 1.0)
        assert crossing_position(x, u, 0.3) == pytest.approx(7.0, abs=1e-12)

    @pytest.mark.unit
    def test_gaussian_snapshot(self, config):
        snap = FieldState(config, 0.0, np.exp(-config.x ** 2))
        assert extract_front(snap, 0.5) == pytest.approx(math.sqrt(math.log(2.0)), abs=1e-3)
        assert extract_front(snap, 0.5, "left") == pytest.approx(-math.sqrt(math.log(2.0)), abs=1e-3)

    @pytest.mark.unit
    @pytest.mark.parametrize("level,side", [(0.0, "right"), (1.0, "right"), (0.5, "up")])
    def test_bad_arguments(self, level, side):
        with pytest.raises(DomainError):
            crossing_position(np.arange(3.0), np.ones(3), level, side)


@allure.epic("Fronts")
@allure.feature("Traces")
class TestTraces:

    @pytest.mark.unit
    def test_invariants(self):
        with pytest.raises(InvariantError):
            FrontTrace(0.5, "right", [(1.0, 0.0), (0.5, 1.0)])
        with pytest.raises(InvariantError):
            FrontTrace(0.5, "right", [(0.0, math.nan)])
        with pytest.raises(DomainError):
            FrontTrace(1.5, "right")

    @pytest.mark.unit
    def test_left_displacement(self):
        trace = synthetic_trace(lambda t: -30.0 - t, [0.0, 1.0], side="left", origin=30.0)
        assert trace.displacements.tolist() == [0.0, 1.0]

    @pytest.mark.unit
    def test_recorder_marks_missing_levels(self, config):
        recorder = FrontRecorder(0.5)
        recorder(FieldState(config, 0.0, np.exp(-config.x ** 2)))
        recorder(FieldState(config, 0.05, np.zeros(config.N)))
        trace = recorder.trace()
        assert len(trace.samples) == 1
        assert not trace.complete
        assert recorder.missing == 1

    @pytest.mark.unit
    def test_trace_front(self, config):
        snaps = [FieldState(config, 0.05 * i, np.exp(-(config.x / (1 + i)) ** 2), i) for i in range(3)]
        trace = trace_front(snaps, 0.5)
        assert trace.complete
        assert trace.times.tolist() == pytest.approx([0.0, 0.05, 0.1])
        assert np.all(np.diff(trace.positions) > 0)
        assert trace.to_rows(0.9)[0][:3] == (0.9, 0.5, "right")


@allure.epic("Fronts")
@allure.feature("Regime Fits")
class TestRegimeFits:

    @allure.title("Linear front: exact speed and no crossover")
    @pytest.mark.unit
    def test_linear(self):
        trace = synthetic_trace(lambda t: 2.0 * t, np.arange(0.0, 10.5, 0.5))
        fit = fit_regimes(trace, (1.0, 9.0), None)
        assert fit.sigma_linear == pytest.approx(2.0, abs=1e-12)
        assert fit.linear.residual_norm == pytest.approx(0.0, abs=1e-9)
        assert fit.sigma_exp is None
        assert fit.crossover_time is None

    @pytest.mark.unit
    def test_exponential(self):
        trace = synthetic_trace(lambda t: 5.0 * math.exp(0.4 * t), np.arange(0.0, 10.25, 0.25))
        fit = fit_regimes(trace, (0.0, 1.0), (2.0, 8.0))
        assert fit.sigma_exp == pytest.approx(0.4, abs=1e-12)
        assert fit.exponential.window == (2.0, 8.0)

    @allure.title("Crossover of a front that leaves its linear envelope")
    @allure.severity(allure.severity_level.CRITICAL)
    @pytest.mark.unit
    def test_crossover(self):
        def position(t):
            return t if t <= 10.0 else t + 2.0 * (t - 10.0) ** 2

        fit = fit_regimes(synthetic_trace(position, np.arange(0.0, 16.25, 0.25)), (1.0, 9.0), None)
        assert fit.sigma_linear == pytest.approx(1.0, abs=1e-12)
        assert 12.0 < fit.crossover_time < 13.0

    @pytest.mark.unit
    def test_crossover_factor_override(self):
        def position(t):
            return t if t <= 10.0 else t + 2.0 * (t - 10.0) ** 2

        trace = synthetic_trace(position, np.arange(0.0, 16.25, 0.25))
        default = fit_regimes(trace, (1.0, 9.0), None).crossover_time
        later = fit_regimes(trace, (1.0, 9.0), None, crossover_factor=3.0).crossover_time
        assert later > default

    @pytest.mark.unit
    def test_insufficient_samples(self):
        trace = synthetic_trace(lambda t: t, np.arange(0.0, 10.0, 1.0))
        with pytest.raises(InsufficientSamplesError):
            fit_regimes(trace, (2.0, 4.0), None)

    @pytest.mark.unit
    def test_degenerate_window(self):
        trace = FrontTrace(0.5, "right", [(1.0, float(i)) for i in range(5)])
        with pytest.raises(DegenerateFitError):
            fit_regimes(trace, (1.0, 1.0), None)

    @pytest.mark.unit
    def test_exponential_needs_positive_displacement(self):
        trace = synthetic_trace(lambda t: t - 5.0, np.arange(0.0, 10.0, 0.5))
        with pytest.raises(DegenerateFitError):
            fit_regimes(trace, (6.0, 9.0), (0.0, 9.0))

    @pytest.mark.unit
    def test_reversed_window(self):
        trace = synthetic_trace(lambda t: t, np.arange(0.0, 10.0, 0.5))
        with pytest.raises(DomainError):
            fit_regimes(trace, (5.0, 1.0), None)

    @pytest.mark.unit
    def test_fit_json_shape(self):
        trace = synthetic_trace(lambda t: 5.0 * math.exp(0.4 * t), np.arange(0.0, 10.25, 0.25))
        fit = fit_regimes(trace, (0.0, 2.0), (2.0, 8.0))
        payload = {"alpha": 0.9, **fit.to_dict(), "tau_alpha": None, "tau_log": None}
        assert SchemaValidator.validate("fit", payload)["valid"]


@allure.epic("Fronts")
@allure.feature("Envelopes")
class TestEnvelope:

    @pytest.mark.unit
    def test_gap(self):
        assert linear_envelope_gap(0.5, 2.0) == pytest.approx(2.0)
        assert linear_envelope_gap(1.0, 7.0) == 0.0

    @pytest.mark.unit
    def test_bad_arguments(self):
        with pytest.raises(DomainError):
            linear_envelope_gap(1.5, 1.0)
        with pytest.raises(DomainError):
            linear_envelope_gap(0.5, -1.0)
