"""
One-dimensional periodic pseudo-spectral solver for

    u_t + (-Delta)^alpha u = u - u^2

on [-L, L). The linear part (including the +u of the reaction) is applied
exactly in Fourier space; -u^2 goes through a two-stage exponential
Runge-Kutta corrector (ETD2RK with its inner stage at the half step) with
2/3-rule dealiasing.
"""
import math
import time
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple, TYPE_CHECKING

import numpy as np

from config.settings import settings
from src.core.exceptions import DomainError, EdgeGuardViolation, RangeViolationError
from src.core.logger import LabLogger
from src.core.utilities import performance_timer
from src.fractional.params import FracParams

if TYPE_CHECKING:
    from src.dynamics.initial_data import InitialDatum

logger = LabLogger.get_logger(__name__)

# |z| below which phi-functions switch to their Taylor series
PHI_SERIES_THRESHOLD = 1e-4
KEEP_MODES = ("all", "ends")


@dataclass(frozen=True)
class SolverConfig:
    """Periodic grid, time stepping and run controls"""
    params: FracParams
    L: float
    N: int
    dt: float
    t_end: float
    snapshot_times: Tuple[float, ...] = ()
    dealias: bool = True
    edge_guard: float = 0.05
    reaction_on: bool = True
    range_tol: float = field(default_factory=lambda: settings.range_tol)
    edge_fraction: float = field(default_factory=lambda: settings.edge_fraction)

    def __post_init__(self):
        object.__setattr__(self, "snapshot_times", tuple(float(s) for s in self.snapshot_times))
        self.params.require_dimension("SolverConfig", 1)

        if self.N <= 0 or self.N & (self.N - 1) or self.N < 2 ** 12:
            raise DomainError(f"N must be a power of two >= 4096, got {self.N}")
        if not self.L > 0:
            raise DomainError(f"L must be positive, got {self.L}")
        if self.h > 0.5:
            raise DomainError(f"Grid spacing 2L/N = {self.h} exceeds 0.5")
        if not 0 < self.dt <= 0.1:
            raise DomainError(f"dt must lie in (0, 0.1], got {self.dt}")
        if not self.t_end >= 0 or not math.isfinite(self.t_end):
            raise DomainError(f"t_end must be finite and nonnegative, got {self.t_end}")
        times = self.snapshot_times
        if any(b < a for a, b in zip(times, times[1:])):
            raise DomainError("snapshot_times must be sorted")
        if times and (times[0] < 0 or times[-1] > self.t_end):
            raise DomainError(f"snapshot_times must lie in [0, {self.t_end}]")
        if not 0 < self.edge_guard < 1:
            raise DomainError(f"edge_guard must lie in (0, 1), got {self.edge_guard}")
        if not 0 < self.edge_fraction < 0.5:
            raise DomainError(f"edge_fraction must lie in (0, 0.5), got {self.edge_fraction}")
        if self.range_tol < 0:
            raise DomainError("range_tol must be nonnegative")

    @property
    def h(self) -> float:
        return 2.0 * self.L / self.N

    @property
    def x(self) -> np.ndarray:
        return -self.L + self.h * np.arange(self.N)

    @property
    def wavenumbers(self) -> np.ndarray:
        return 2.0 * math.pi * np.fft.rfftfreq(self.N, self.h)

    @property
    def n_steps(self) -> int:
        return int(round(self.t_end / self.dt))

    @property
    def edge_points(self) -> int:
        return max(1, int(math.ceil(self.edge_fraction * self.N)))

    @property
    def requested_snapshots(self) -> Tuple[float, ...]:
        return self.snapshot_times or (0.0, self.t_end)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "alpha": self.params.alpha,
            "d": self.params.d,
            "L": self.L,
            "N": self.N,
            "dt": self.dt,
            "t_end": self.t_end,
            "snapshot_times": list(self.snapshot_times),
            "dealias": self.dealias,
            "edge_guard": self.edge_guard,
            "reaction_on": self.reaction_on,
            "range_tol": self.range_tol,
            "edge_fraction": self.edge_fraction,
        }


def edge_zone_max(u: np.ndarray, points: int) -> float:
    """max |u| over the ``points`` grid values nearest each end"""
    return float(max(np.max(np.abs(u[:points])), np.max(np.abs(u[-points:]))))


@dataclass(frozen=True)
class FieldState:
    """Solution u(., t) on the grid of ``config``"""
    config: SolverConfig
    t: float
    u: np.ndarray
    step_index: int = 0

    def __post_init__(self):
        u = np.array(self.u, dtype=float)
        if u.shape != (self.config.N,):
            raise DomainError(f"Field must have {self.config.N} values, got shape {u.shape}")
        u.setflags(write=False)
        object.__setattr__(self, "u", u)

    @property
    def mass(self) -> float:
        return float(np.sum(self.u) * self.config.h)

    @property
    def umin(self) -> float:
        return float(np.min(self.u))

    @property
    def umax(self) -> float:
        return float(np.max(self.u))

    @property
    def edge_max(self) -> float:
        return edge_zone_max(self.u, self.config.edge_points)

    def diagnostics(self) -> Dict[str, float]:
        return {
            "t": self.t,
            "step": self.step_index,
            "mass": self.mass,
            "umin": self.umin,
            "umax": self.umax,
            "edge_max": self.edge_max,
        }


def phi_functions(z: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """phi1 = (e^z - 1)/z and phi2 = (e^z - 1 - z)/z^2 with a series near 0"""
    z = np.asarray(z, dtype=float)
    small = np.abs(z) < PHI_SERIES_THRESHOLD
    safe = np.where(small, 1.0, z)
    em1 = np.expm1(safe)
    phi1 = np.where(small, 1 + z / 2 + z ** 2 / 6 + z ** 3 / 24 + z ** 4 / 120, em1 / safe)
    phi2 = np.where(small, 0.5 + z / 6 + z ** 2 / 24 + z ** 3 / 120 + z ** 4 / 720,
                    (em1 - safe) / safe ** 2)
    return phi1, phi2


class SpectralStepper:
    """ETD2RK integrator with precomputed propagator and phi-coefficients"""

    def __init__(self, config: SolverConfig):
        self.config = config
        k = config.wavenumbers
        growth = 1.0 if config.reaction_on else 0.0
        self.linear = growth - np.power(k, 2.0 * config.params.alpha)
        z = self.linear * config.dt
        self.propagator = np.exp(z)
        self.half_propagator = np.exp(z / 2)
        half_phi1, _ = phi_functions(z / 2)
        self.half_coeff = 0.5 * config.dt * half_phi1
        # u_{n+1} = e^z u + dt[(phi1 - 2 phi2) N(u) + 2 phi2 N(a)], a at t + dt/2
        phi1, phi2 = phi_functions(z)
        self.weight_u = config.dt * (phi1 - 2.0 * phi2)
        self.weight_a = 2.0 * config.dt * phi2
        modes = np.arange(k.size)
        self.mask = (modes <= config.N / 3.0) if config.dealias else np.ones(k.size, dtype=bool)

    def nonlinear(self, u: np.ndarray) -> np.ndarray:
        if not self.config.reaction_on:
            return np.zeros(self.config.N // 2 + 1, dtype=complex)
        return np.fft.rfft(-u * u) * self.mask

    def advance(self, u: np.ndarray) -> np.ndarray:
        """One unchecked ETD2RK step"""
        n = self.config.N
        u_hat = np.fft.rfft(u)
        n_u = self.nonlinear(u)
        a = np.fft.irfft(self.half_propagator * u_hat + self.half_coeff * n_u, n=n)
        n_a = self.nonlinear(a)
        return np.fft.irfft(self.propagator * u_hat + self.weight_u * n_u + self.weight_a * n_a, n=n)

    def check_range(self, u: np.ndarray, t: float) -> Tuple[np.ndarray, int]:
        """Clamp values within range_tol of [0, 1]; raise beyond it"""
        tol = self.config.range_tol
        umin, umax = float(np.min(u)), float(np.max(u))
        if umin < -tol or umax > 1.0 + tol:
            raise RangeViolationError(
                f"Solution left [0, 1] at t={t:.6g}: min={umin!r}, max={umax!r}", t, umin, umax)
        outside = (u < 0.0) | (u > 1.0)
        clamped = int(np.count_nonzero(outside))
        if clamped:
            u = np.clip(u, 0.0, 1.0)
        return u, clamped

    def check_edge(self, u: np.ndarray, t: float):
        """Raise once the boundary zone exceeds edge_guard, unless u is the equilibrium 1"""
        edge = edge_zone_max(u, self.config.edge_points)
        if edge > self.config.edge_guard and float(np.min(u)) < 1.0 - self.config.range_tol:
            raise EdgeGuardViolation(
                f"Solution reached the boundary zone at t={t:.6g}: max |u| = {edge:.3g} "
                f"> edge_guard {self.config.edge_guard}", t, edge)


@lru_cache(maxsize=8)
def stepper_for(config: SolverConfig) -> SpectralStepper:
    return SpectralStepper(config)


def step(state: FieldState, config: Optional[SolverConfig] = None) -> FieldState:
    """
    Advance ``state`` by one timestep of ``config``. Raises
    RangeViolationError or EdgeGuardViolation.
    """
    config = config or state.config
    stepper = stepper_for(config)
    t_next = (state.step_index + 1) * config.dt
    u, _ = stepper.check_range(stepper.advance(state.u), t_next)
    stepper.check_edge(u, t_next)
    return FieldState(config, t_next, u, state.step_index + 1)


@dataclass
class RunResult:
    """Snapshots of one run plus the manifest diagnostics"""
    config: SolverConfig
    snapshots: List[FieldState]
    termination: str
    clamp_count: int
    steps_taken: int
    wall_time: float
    truncated_at: Optional[float] = None
    message: Optional[str] = None
    history: List[Dict[str, float]] = field(default_factory=list)

    @property
    def truncated(self) -> bool:
        return self.termination != "completed"

    @property
    def final(self) -> FieldState:
        return self.snapshots[-1]

    def diagnostics(self) -> List[Dict[str, float]]:
        """Per-snapshot diagnostics of every capture, including those not retained"""
        return self.history or [s.diagnostics() for s in self.snapshots]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "config": self.config.to_dict(),
            "termination": self.termination,
            "truncated": self.truncated,
            "truncated_at": self.truncated_at,
            "message": self.message,
            "clamp_count": self.clamp_count,
            "steps_taken": self.steps_taken,
            "wall_time": self.wall_time,
            "snapshots": self.diagnostics(),
        }


def run(config: SolverConfig, datum: 'InitialDatum',
        observers: Sequence[Callable[[FieldState], None]] = (), keep: str = "all") -> RunResult:
    """
    Integrate from the sampled datum to t_end. Snapshots are captured at the
    nearest step to each requested time and carry the actual step time.
    An edge-guard violation ends the run early with the snapshots so far.

    Every captured snapshot is passed to ``observers``. keep="ends" retains
    only the first and the latest snapshot in the result.
    """
    if keep not in KEEP_MODES:
        raise DomainError(f"keep must be one of {KEEP_MODES}, got '{keep}'")
    started = time.perf_counter()
    state = datum.sample(config)
    stepper = stepper_for(config)
    targets = sorted({int(round(s / config.dt)) for s in config.requested_snapshots})
    n_steps = config.n_steps
    targets = [min(i, n_steps) for i in targets]

    snapshots: List[FieldState] = []
    history: List[Dict[str, float]] = []
    pending = list(targets)
    clamp_count = 0
    u = np.array(state.u)
    index = 0
    termination = "completed"
    truncated_at = None
    message = None

    def capture(i: int, values: np.ndarray):
        snap = FieldState(config, i * config.dt, values, i)
        if keep == "all" or not snapshots:
            snapshots.append(snap)
        else:
            snapshots[1:] = [snap]
        history.append(snap.diagnostics())
        for observer in observers:
            observer(snap)
        logger.log_run_progress(snap.t, i, snap.umin, snap.umax, snap.edge_max)

    while pending and pending[0] == 0:
        capture(0, u)
        pending.pop(0)

    with performance_timer.measure("solver.run"):
        try:
            while index < n_steps:
                t = (index + 1) * config.dt
                candidate, clamped = stepper.check_range(stepper.advance(u), t)
                stepper.check_edge(candidate, t)
                u = candidate
                index += 1
                clamp_count += clamped
                while pending and pending[0] == index:
                    capture(index, u)
                    pending.pop(0)
        except EdgeGuardViolation as e:
            termination = "edge_guard"
            truncated_at = e.t
            message = str(e)
            logger.warning(f"Run truncated: {e}", t=e.t, edge_max=e.edge_max)

    wall = time.perf_counter() - started
    logger.info(f"Run finished ({termination}) after {index} steps, {len(snapshots)} snapshots, "
                f"{clamp_count} clamped values, {wall:.2f}s", termination=termination)
    return RunResult(config, snapshots, termination, clamp_count, index, wall, truncated_at, message,
                     history)
