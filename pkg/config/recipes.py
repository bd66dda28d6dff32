"""
Experiment recipes in flat ``key = value`` form.

    # alpha = 1 front from an indicator
    alpha = 1.0
    L = 200
    N = 16384
    dt = 0.01
    t_end = 40
    snapshot_every = 0.5
    kind = indicator
    eps = 1.0
    r0 = 5
    level = 0.5
    linear_window = 25, 40

Keys are the SolverConfig, InitialDatum and fit-window field names.
List values are comma separated. ``snapshot_every`` expands to
snapshot_times 0, s, 2s, ... up to t_end. ``alphas`` is read by the sweep.
"""
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Dict, Optional, Tuple

from src.core.exceptions import ConfigError, DomainError
from src.core.logger import LabLogger

logger = LabLogger.get_logger(__name__)

_TRUE = {"true", "yes", "on", "1"}
_FALSE = {"false", "no", "off", "0"}


def _bool(raw: str) -> bool:
    value = raw.strip().lower()
    if value in _TRUE:
        return True
    if value in _FALSE:
        return False
    raise ValueError(f"not a boolean: '{raw}'")


def _floats(raw: str) -> Tuple[float, ...]:
    return tuple(float(v) for v in raw.split(",") if v.strip())


def _window(raw: str) -> Tuple[float, float]:
    values = _floats(raw)
    if len(values) != 2:
        raise ValueError(f"expected two comma-separated numbers, got '{raw}'")
    return values


def _int(raw: str) -> int:
    value = float(raw)
    if not value.is_integer():
        raise ValueError(f"not an integer: '{raw}'")
    return int(value)


SOLVER_FIELDS: Dict[str, Callable[[str], Any]] = {
    "alpha": float,
    "L": float,
    "N": _int,
    "dt": float,
    "t_end": float,
    "snapshot_times": _floats,
    "snapshot_every": float,
    "dealias": _bool,
    "edge_guard": float,
    "reaction_on": _bool,
    "range_tol": float,
    "edge_fraction": float,
}

DATUM_FIELDS: Dict[str, Callable[[str], Any]] = {
    "kind": str,
    "mollify": float,
    "eps": float,
    "r0": float,
    "ramp": float,
    "eps_alpha": float,
    "kappa": float,
    "W": float,
    "beta": float,
    "gamma": float,
}

FRONT_FIELDS: Dict[str, Callable[[str], Any]] = {
    "level": float,
    "side": str,
    "origin": float,
    "linear_window": _window,
    "exp_window": _window,
    "crossover_factor": float,
    "alphas": _floats,
}

FIELD_TYPES = {**SOLVER_FIELDS, **DATUM_FIELDS, **FRONT_FIELDS}
REQUIRED = ("L", "N", "dt", "t_end", "kind")


def parse_recipe(text: str, source: str = "<recipe>") -> Dict[str, Any]:
    """Parse and coerce recipe text; unknown or repeated keys raise ConfigError"""
    values: Dict[str, Any] = {}
    for number, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{number}: expected 'key = value', got '{line}'")
        key, raw = (part.strip() for part in line.split("=", 1))
        if key not in FIELD_TYPES:
            raise ConfigError(f"{source}:{number}: unknown key '{key}'")
        if key in values:
            raise ConfigError(f"{source}:{number}: duplicate key '{key}'")
        try:
            values[key] = FIELD_TYPES[key](raw)
        except ValueError as e:
            raise ConfigError(f"{source}:{number}: bad value for '{key}': {e}") from e

    missing = [k for k in REQUIRED if k not in values]
    if "alpha" not in values and "alphas" not in values:
        missing.insert(0, "alpha")
    if missing:
        raise ConfigError(f"{source}: missing keys {', '.join(missing)}")
    return values


def _snapshot_times(values: Dict[str, Any]) -> Tuple[float, ...]:
    if "snapshot_times" in values and "snapshot_every" in values:
        raise ConfigError("Give either snapshot_times or snapshot_every, not both")
    if "snapshot_every" not in values:
        return tuple(values.get("snapshot_times", ()))
    every, t_end = values["snapshot_every"], values["t_end"]
    if not every > 0:
        raise ConfigError(f"snapshot_every must be positive, got {every}")
    count = int(math.floor(t_end / every + 1e-9))
    return tuple(min(i * every, t_end) for i in range(count + 1))


@dataclass(frozen=True)
class Recipe:
    """Parsed experiment: a solver config, an initial datum and the front settings"""
    values: Dict[str, Any]
    source: str = "<recipe>"

    @property
    def alpha(self) -> float:
        if "alpha" in self.values:
            return self.values["alpha"]
        return self.values["alphas"][0]

    @property
    def alphas(self) -> Tuple[float, ...]:
        return tuple(self.values.get("alphas", (self.alpha,)))

    def solver_config(self, alpha: Optional[float] = None):
        from src.dynamics.solver import SolverConfig
        from src.fractional.params import FracParams

        kwargs = {k: v for k, v in self.values.items()
                  if k in SOLVER_FIELDS and k not in ("alpha", "snapshot_every")}
        kwargs["snapshot_times"] = _snapshot_times(self.values)
        try:
            return SolverConfig(params=FracParams(self.alpha if alpha is None else alpha, 1), **kwargs)
        except DomainError as e:
            raise ConfigError(f"{self.source}: {e}") from e

    def datum(self):
        from src.dynamics.initial_data import InitialDatum

        params = {k: v for k, v in self.values.items() if k in DATUM_FIELDS and k not in ("kind", "mollify")}
        return InitialDatum(self.values["kind"], params, self.values.get("mollify", 0.0))

    @property
    def level(self) -> float:
        return self.values.get("level", 0.5)

    @property
    def side(self) -> str:
        return self.values.get("side", "right")

    @property
    def origin(self) -> float:
        return self.values.get("origin", 0.0)

    @property
    def linear_window(self) -> Optional[Tuple[float, float]]:
        return self.values.get("linear_window")

    @property
    def exp_window(self) -> Optional[Tuple[float, float]]:
        return self.values.get("exp_window")

    @property
    def crossover_factor(self) -> Optional[float]:
        return self.values.get("crossover_factor")

    def to_dict(self) -> Dict[str, Any]:
        return {k: list(v) if isinstance(v, tuple) else v for k, v in sorted(self.values.items())}


def load_recipe(path: str) -> Recipe:
    """Read a recipe file"""
    file = Path(path)
    if not file.is_file():
        raise ConfigError(f"Recipe file not found: {path}")
    recipe = Recipe(parse_recipe(file.read_text(encoding="utf-8"), str(file)), str(file))
    logger.info(f"Loaded recipe {file} ({len(recipe.values)} keys)", source=str(file))
    return recipe
