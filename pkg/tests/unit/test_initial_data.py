"""
Named initial profiles and their sampling checks.
"""
import math

import allure
import numpy as np
import pytest

from src.core.exceptions import ConfigError, ConfigMismatchError, DomainError
from src.dynamics.initial_data import InitialDatum, make_initial_datum
from src.dynamics.solver import SolverConfig
from src.fractional.params import FracParams


@pytest.fixture
def config():
    return SolverConfig(FracParams(0.75), 100.0, 4096, 0.05, 1.0)


@allure.epic("Dynamics")
@allure.feature("Initial Data")
class TestProfiles:

    @pytest.mark.unit
    def test_indicator(self, config):
        datum = InitialDatum("indicator", {"eps": 0.4, "r0": 2.0})
        values = datum.profile(np.array([0.0, 2.0, 2.01]), config)
        assert values.tolist() == [0.4, 0.4, 0.0]

    @pytest.mark.unit
    def test_smooth_bump(self, config):
        datum = InitialDatum("smooth_bump", {"eps": 0.5, "r0": 3.0, "ramp": 2.0})
        values = datum.profile(np.array([0.0, 3.0, 4.0, 5.0, 7.0]), config)
        assert values[:2].tolist() == [0.5, 0.5]
        assert values[2] == pytest.approx(0.25)
        assert values[3:].tolist() == [0.0, 0.0]

    @pytest.mark.unit
    def test_algebraic_profile(self, config):
        datum = InitialDatum("algebraic_profile", {"eps_alpha": 0.3, "r0": 10.0})
        values = datum.profile(np.array([5.0, 20.0]), config)
        assert values[0] == 0.3
        assert values[1] == pytest.approx(0.3 * 2.0 ** -2.5)

    @pytest.mark.unit
    def test_algebraic_default_level(self, config):
        datum = InitialDatum("algebraic_profile", {"r0": 10.0})
        assert datum.profile(np.array([0.0]), config)[0] == pytest.approx(math.sin(0.75 * math.pi))

    @pytest.mark.unit
    def test_plateau(self, config):
        datum = InitialDatum("plateau_stretched_exp", {"W": 30.0})
        values = datum.profile(np.array([-30.0, 0.0, 38.0]), config)
        assert values[:2].tolist() == [1.0, 1.0]
        assert values[2] == pytest.approx(math.exp(-8.0 ** 0.75))

    @pytest.mark.unit
    def test_stretched_exp(self, config):
        datum = InitialDatum("stretched_exp_gamma", {"gamma": 0.5, "beta": 0.5})
        values = datum.profile(np.array([0.0, 4.0]), config)
        assert values[0] == 1.0
        assert values[1] == pytest.approx(math.exp(-1.0))

    @pytest.mark.unit
    def test_sample(self, config):
        state = make_initial_datum("smooth_bump", config, {"eps": 0.5, "r0": 5.0}, mollify=0.2)
        assert state.t == 0.0 and state.step_index == 0
        assert 0.0 <= state.umin and state.umax <= 0.5
        assert state.mass == pytest.approx(0.5 * 11.0, rel=1e-3)

    @pytest.mark.unit
    def test_to_dict(self):
        datum = InitialDatum("indicator", {"eps": 0.4, "r0": 2.0}, 0.2)
        assert datum.to_dict() == {"kind": "indicator", "params": {"eps": 0.4, "r0": 2.0}, "mollify": 0.2}


@allure.epic("Dynamics")
@allure.feature("Initial Data")
class TestProfileErrors:

    @pytest.mark.unit
    @pytest.mark.parametrize("kind,params", [
        ("sawtooth", {}),
        ("indicator", {"eps": 0.4}),
        ("indicator", {"eps": 0.4, "r0": 2.0, "width": 1.0}),
        ("plateau_stretched_exp", {}),
    ])
    def test_config_errors(self, kind, params):
        with pytest.raises(ConfigError):
            InitialDatum(kind, params)

    @pytest.mark.unit
    def test_support_beyond_domain(self, config):
        with pytest.raises(ConfigMismatchError):
            InitialDatum("indicator", {"eps": 0.4, "r0": 99.0}).sample(config)

    @pytest.mark.unit
    def test_edge_contact(self, config):
        with pytest.raises(ConfigMismatchError):
            InitialDatum("stretched_exp_gamma", {"gamma": 1e-4}).sample(config)

    @pytest.mark.unit
    def test_mollify_too_narrow(self, config):
        with pytest.raises(DomainError):
            InitialDatum("indicator", {"eps": 0.4, "r0": 2.0}, mollify=0.05).sample(config)

    @pytest.mark.unit
    @pytest.mark.parametrize("params", [{"eps": 1.5, "r0": 2.0}, {"eps": 0.4, "r0": -1.0}])
    def test_bad_values(self, config, params):
        with pytest.raises(DomainError):
            InitialDatum("indicator", params).profile(config.x, config)
