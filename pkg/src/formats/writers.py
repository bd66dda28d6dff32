"""
CSV and JSON writers with the fixed column layouts of the lab outputs.
"""
import csv
from pathlib import Path
from typing import Any, Dict, Iterable, List, Sequence, Tuple

from src.core.exceptions import DomainError
from src.core.utilities import file_handler, format_value, to_builtin
from src.dynamics.front import FrontTrace
from src.dynamics.solver import FieldState
from src.dynamics.sweep import SweepMember
from src.formats.schemas import SchemaValidator
from src.fractional.asymptotics import KernelDecomposition
from src.fractional.kernel import KernelTable

KERNEL_COLUMNS = ("x", "p", "method", "alpha", "d", "t")
DECOMPOSITION_COLUMNS = ("alpha", "d", "x", "kernel", "tail", "gauss", "residual", "normalized_residual")
SNAPSHOT_COLUMNS = ("t", "x", "u")
TRACE_COLUMNS = ("alpha", "level", "side", "t", "x")
TRANSITION_COLUMNS = ("alpha", "crossover_time", "tau_alpha", "tau_log", "termination", "error")
TAU_COLUMNS = ("alpha", "d", "C_alpha", "xi_alpha", "tau_alpha", "tau_log", "ratio")


def write_kernel_csv(path: Path, tables: Iterable[KernelTable]) -> Path:
    rows: List[Sequence[Any]] = []
    for table in tables:
        rows.extend(table.to_rows())
    file_handler.write_csv(str(path), rows, KERNEL_COLUMNS)
    return path


def write_decomposition_csv(path: Path, decompositions: Iterable[KernelDecomposition]) -> Path:
    file_handler.write_csv(str(path), (d.to_row() for d in decompositions), DECOMPOSITION_COLUMNS)
    return path


def _snapshot_rows(snap: FieldState, stride: int) -> Iterable[Tuple[float, float, float]]:
    t = snap.t
    for x, u in zip(snap.config.x[::stride].tolist(), snap.u[::stride].tolist()):
        yield t, x, u


def write_snapshots_csv(path: Path, snapshots: Iterable[FieldState], stride: int = 1) -> Path:
    """Long format: one row per (snapshot, every ``stride``-th grid point)"""
    rows = (row for snap in snapshots for row in _snapshot_rows(snap, stride))
    file_handler.write_csv(str(path), rows, SNAPSHOT_COLUMNS)
    return path


class SnapshotStream:
    """
    Run observer appending each snapshot to snapshots.csv as it is captured,
    so long runs need not hold every field in memory.
    """

    def __init__(self, path: Path, stride: int = 1):
        if stride < 1:
            raise DomainError(f"stride must be a positive integer, got {stride}")
        self.path = Path(path)
        self.stride = stride
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self._file = open(self.path, "w", encoding="utf-8", newline="")
        self._writer = csv.writer(self._file, lineterminator="\n")
        self._writer.writerow(SNAPSHOT_COLUMNS)
        self.count = 0

    def __call__(self, snapshot: FieldState):
        self._writer.writerows([format_value(v) for v in row] for row in _snapshot_rows(snapshot, self.stride))
        self.count += 1

    def close(self):
        if not self._file.closed:
            self._file.close()

    def __enter__(self) -> "SnapshotStream":
        return self

    def __exit__(self, *exc):
        self.close()


def write_trace_csv(path: Path, alpha: float, traces: Iterable[FrontTrace]) -> Path:
    rows: List[Sequence[Any]] = []
    for trace in traces:
        rows.extend(trace.to_rows(alpha))
    file_handler.write_csv(str(path), rows, TRACE_COLUMNS)
    return path


def write_transition_csv(path: Path, members: Iterable[SweepMember]) -> Path:
    rows = ([m.to_row()[c] for c in TRANSITION_COLUMNS] for m in members)
    file_handler.write_csv(str(path), rows, TRANSITION_COLUMNS)
    return path


def write_tau_csv(path: Path, scales: Iterable[Dict[str, Any]]) -> Path:
    file_handler.write_csv(str(path), ([s[c] for c in TAU_COLUMNS] for s in scales), TAU_COLUMNS)
    return path


def write_checked_json(path: Path, schema_name: str, data: Dict[str, Any]) -> Path:
    """Validate against the named schema, then write"""
    data = to_builtin(data)
    SchemaValidator.require_valid(schema_name, data)
    file_handler.write_json(str(path), data)
    return path
