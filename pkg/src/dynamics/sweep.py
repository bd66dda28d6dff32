"""
Transition sweep: one front experiment per alpha, run in parallel and
paired with the predicted transition times.
"""
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Any, Dict, List, Optional, Sequence, Tuple

from config.settings import settings
from src.core.exceptions import DomainError, LabError
from src.core.logger import LabLogger
from src.dynamics.front import FrontRecorder, FrontTrace, RegimeFit, fit_regimes
from src.dynamics.initial_data import InitialDatum
from src.dynamics.solver import RunResult, SolverConfig, run
from src.fractional.asymptotics import critical_radius
from src.fractional.params import FracParams

logger = LabLogger.get_logger(__name__)


@dataclass(frozen=True)
class SweepScenario:
    """Everything but alpha: the config template's params are replaced per member"""
    config: SolverConfig
    datum: InitialDatum
    linear_window: Tuple[float, float]
    exp_window: Optional[Tuple[float, float]] = None
    side: str = "right"
    origin: float = 0.0
    crossover_factor: Optional[float] = None

    def config_for(self, alpha: float) -> SolverConfig:
        return replace(self.config, params=FracParams(alpha, self.config.params.d))


@dataclass
class SweepMember:
    alpha: float
    tau_alpha: Optional[float]
    tau_log: float
    result: Optional[RunResult] = None
    trace: Optional[FrontTrace] = None
    fit: Optional[RegimeFit] = None
    error: Optional[str] = None

    @property
    def crossover_time(self) -> Optional[float]:
        return None if self.fit is None else self.fit.crossover_time

    def to_row(self) -> Dict[str, Any]:
        return {
            "alpha": self.alpha,
            "crossover_time": self.crossover_time,
            "tau_alpha": self.tau_alpha,
            "tau_log": self.tau_log,
            "termination": None if self.result is None else self.result.termination,
            "error": self.error,
        }


def _run_member(alpha: float, scenario: SweepScenario, level: float) -> SweepMember:
    params = FracParams(alpha, scenario.config.params.d)
    member = SweepMember(alpha, None, -math.log1p(-alpha))
    try:
        member.tau_alpha = critical_radius(params).tau_alpha
        recorder = FrontRecorder(level, scenario.side, scenario.origin)
        member.result = run(scenario.config_for(alpha), scenario.datum, [recorder], keep="ends")
        member.trace = recorder.trace()
        member.fit = fit_regimes(member.trace, scenario.linear_window, scenario.exp_window,
                                 scenario.crossover_factor)
    except LabError as e:
        member.error = f"{type(e).__name__}: {e}"
        logger.error(f"Sweep member alpha={alpha} failed: {e}", alpha=alpha)
    return member


def transition_sweep(alphas: Sequence[float], scenario: SweepScenario, level: float = 0.5,
                     threads: Optional[int] = None) -> List[SweepMember]:
    """
    Run the scenario for each alpha in (0.5, 1). Failures are recorded on
    the member and the remaining members still run. Results come back in
    the order of ``alphas``.
    """
    alphas = [float(a) for a in alphas]
    if not alphas:
        raise DomainError("transition_sweep needs at least one alpha")
    bad = [a for a in alphas if not 0.5 < a < 1.0]
    if bad:
        raise DomainError(f"Sweep alphas must lie in (0.5, 1), got {bad}")

    workers = max(1, min(threads or settings.threads, len(alphas)))
    logger.info(f"Transition sweep over {len(alphas)} alphas with {workers} workers", level=level)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(_run_member, a, scenario, level) for a in alphas]
        return [f.result() for f in futures]
