"""
Utility classes shared by the numerical modules and the CLI.
Timing of named operations and deterministic file output.
"""
import os
import csv
import json
import time
import hashlib
import contextlib
import threading
from typing import Dict, Any, List, Optional, Sequence, Iterable
from pathlib import Path

import yaml
import numpy as np


def format_value(value: Any) -> str:
    """Shortest round-trip text for floats, empty for None, plain str for everything else"""
    if value is None:
        return ""
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, (np.integer,)):
        return str(int(value))
    return str(value)


def to_builtin(value: Any) -> Any:
    """Recursively convert numpy scalars and arrays into JSON-friendly builtins"""
    if isinstance(value, dict):
        return {str(k): to_builtin(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_builtin(v) for v in value]
    if isinstance(value, np.ndarray):
        return [to_builtin(v) for v in value.tolist()]
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, Path):
        return str(value)
    return value


class PerformanceTimer:
    """Performance timing and measurement utility"""

    def __init__(self):
        self.timings: Dict[str, List[float]] = {}
        self.start_times: Dict[str, float] = {}
        self._lock = threading.Lock()

    def start(self, name: str):
        """Start timing for a named operation"""
        self.start_times[name] = time.perf_counter()

    def stop(self, name: str) -> float:
        """Stop timing and return duration"""
        if name not in self.start_times:
            raise KeyError(f"No timer started for '{name}'")

        duration = time.perf_counter() - self.start_times.pop(name)
        self.record(name, duration)
        return duration

    def record(self, name: str, duration: float):
        with self._lock:
            self.timings.setdefault(name, []).append(duration)

    @contextlib.contextmanager
    def measure(self, name: str):
        """Context manager for timing code blocks (safe across threads)"""
        start = time.perf_counter()
        try:
            yield
        finally:
            self.record(name, time.perf_counter() - start)

    def get_stats(self, name: Optional[str] = None) -> Dict[str, Any]:
        """Get timing statistics"""
        if name:
            if name not in self.timings:
                return {}

            timings = self.timings[name]
            return {
                "name": name,
                "count": len(timings),
                "total": sum(timings),
                "average": sum(timings) / len(timings),
                "min": min(timings),
                "max": max(timings),
                "last": timings[-1]
            }

        return {key: self.get_stats(key) for key in sorted(self.timings)}

    def reset(self, name: Optional[str] = None):
        """Reset timings"""
        if name:
            self.timings.pop(name, None)
            self.start_times.pop(name, None)
        else:
            self.timings.clear()
            self.start_times.clear()

    def log_stats(self, logger):
        """Send the total of every timer to ``logger.log_performance``"""
        for name, stat in self.get_stats().items():
            logger.log_performance(f"{name}.seconds", stat["total"])


class FileHandler:
    """
    Deterministic file output.
    Floats are written with ``repr`` so re-running a command reproduces bytes.
    """

    @staticmethod
    def sha256(filepath: str) -> str:
        """Calculate sha256 digest of a file"""
        digest = hashlib.sha256()
        with open(filepath, "rb") as f:
            for chunk in iter(lambda: f.read(1 << 16), b""):
                digest.update(chunk)
        return digest.hexdigest()

    @staticmethod
    def file_meta(filepath: str) -> Dict[str, Any]:
        path = Path(filepath)
        return {
            "path": path.name,
            "bytes": path.stat().st_size,
            "sha256": FileHandler.sha256(str(path))
        }

    @staticmethod
    def read_json(filepath: str) -> Dict[str, Any]:
        """Read JSON file"""
        with open(filepath, 'r', encoding='utf-8') as f:
            return json.load(f)

    @staticmethod
    def write_json(filepath: str, data: Dict[str, Any], indent: int = 2):
        """Write JSON atomically with sorted keys"""
        path = Path(filepath)
        path.parent.mkdir(parents=True, exist_ok=True)
        tmp = path.with_name(path.name + ".tmp")
        with open(tmp, 'w', encoding='utf-8') as f:
            json.dump(to_builtin(data), f, indent=indent, sort_keys=True, allow_nan=True)
            f.write("\n")
        os.replace(tmp, path)

    @staticmethod
    def read_yaml(filepath: str) -> Dict[str, Any]:
        """Read YAML file"""
        with open(filepath, 'r', encoding='utf-8') as f:
            return yaml.safe_load(f)

    @staticmethod
    def read_csv(filepath: str) -> List[Dict[str, str]]:
        """Read CSV file"""
        with open(filepath, 'r', encoding='utf-8', newline='') as f:
            return list(csv.DictReader(f))

    @staticmethod
    def write_csv(filepath: str, rows: Iterable[Sequence[Any]], fieldnames: Sequence[str]):
        """Write CSV file from positional rows"""
        path = Path(filepath)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, 'w', encoding='utf-8', newline='') as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(fieldnames)
            for row in rows:
                writer.writerow([format_value(v) for v in row])


performance_timer = PerformanceTimer()
file_handler = FileHandler()
