"""
Parallel transition sweeps over alpha.
"""
import allure
import pytest

from src.core.exceptions import DomainError
from src.dynamics.initial_data import InitialDatum
from src.dynamics.solver import SolverConfig
from src.dynamics.sweep import SweepScenario, transition_sweep
from src.fractional.params import FracParams


def make_scenario(window=(0.2, 0.9)) -> SweepScenario:
    config = SolverConfig(FracParams(0.9), 100.0, 4096, 0.05, 1.0,
                          snapshot_times=tuple(0.1 * i for i in range(11)))
    datum = InitialDatum("smooth_bump", {"eps": 0.5, "r0": 5.0})
    return SweepScenario(config, datum, window)


@allure.epic("Dynamics")
@allure.feature("Transition Sweep")
class TestTransitionSweep:

    @pytest.mark.unit
    @pytest.mark.parametrize("alphas", [[], [0.4], [0.9, 1.0]])
    def test_rejects_bad_alphas(self, alphas):
        with pytest.raises(DomainError):
            transition_sweep(alphas, make_scenario())

    @pytest.mark.unit
    def test_config_for(self):
        scenario = make_scenario()
        config = scenario.config_for(0.95)
        assert config.params == FracParams(0.95)
        assert config.L == scenario.config.L
        assert config.snapshot_times == scenario.config.snapshot_times

    @allure.title("Members come back in order with fits and predictions")
    @pytest.mark.unit
    @pytest.mark.slow
    def test_sweep(self):
        members = transition_sweep([0.95, 0.9], make_scenario(), level=0.25, threads=2)
        assert [m.alpha for m in members] == [0.95, 0.9]
        for member in members:
            assert member.error is None
            assert member.trace.complete
            assert member.fit.sigma_linear > 0
            assert member.tau_alpha > 0
            assert member.to_row()["termination"] == "completed"
            assert len(member.result.snapshots) == 2

    @pytest.mark.unit
    @pytest.mark.slow
    def test_failure_is_recorded(self):
        members = transition_sweep([0.9], make_scenario(window=(5.0, 6.0)), level=0.25)
        member = members[0]
        assert member.fit is None
        assert member.error.startswith("InsufficientSamplesError")
        assert member.crossover_time is None
        assert member.result.termination == "completed"
