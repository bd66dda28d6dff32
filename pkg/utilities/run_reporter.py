"""
Run manifests: what was run, with which configuration, and which files it produced
"""
import sys
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, List, Optional

from config.settings import settings
from src.core.logger import LabLogger
from src.core.utilities import file_handler, performance_timer
from src.formats.schemas import SchemaValidator

logger = LabLogger.get_logger(__name__)

MANIFEST_NAME = "manifest.json"


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


class RunReporter:
    """Collects outputs of one CLI command and writes manifest.json next to them"""

    def __init__(self, command: str, output_dir: str, config: Dict[str, Any],
                 argv: Optional[List[str]] = None):
        from src import __version__

        self.command = command
        self.output_dir = Path(output_dir)
        self.output_dir.mkdir(parents=True, exist_ok=True)
        self.config = config
        self.argv = list(sys.argv[1:] if argv is None else argv)
        self.version = __version__
        self.started_at = _now()
        self.files: List[Path] = []
        self.results: Dict[str, Any] = {}
        performance_timer.reset()
        performance_timer.start("command")

    def path(self, name: str) -> Path:
        return self.output_dir / name

    def add_file(self, path: Path):
        path = Path(path)
        if path not in self.files:
            self.files.append(path)

    def add_result(self, key: str, value: Any):
        self.results[key] = value

    def build(self, exit_code: int) -> Dict[str, Any]:
        wall = performance_timer.stop("command")
        return {
            "command": self.command,
            "argv": self.argv,
            "version": self.version,
            "config": self.config,
            "settings": settings.to_dict(),
            "started_at": self.started_at,
            "finished_at": _now(),
            "wall_time": wall,
            "exit_code": exit_code,
            "files": [self._file_entry(p) for p in self.files],
            "timings": performance_timer.get_stats(),
            "results": self.results,
        }

    def _file_entry(self, path: Path) -> Dict[str, Any]:
        meta = file_handler.file_meta(str(path))
        meta["path"] = path.relative_to(self.output_dir).as_posix()
        return meta

    def write(self, exit_code: int = 0) -> Path:
        """Digest every recorded file and write the manifest"""
        from src.formats.writers import write_checked_json

        manifest = self.build(exit_code)
        performance_timer.log_stats(logger)
        target = write_checked_json(self.path(MANIFEST_NAME), "manifest", manifest)
        logger.info(f"Manifest written: {target} ({len(self.files)} files)", exit_code=exit_code)
        return target


def verify_manifest(manifest_path: str) -> Dict[str, Any]:
    """Recompute digests of the listed files; returns {valid, mismatches, schema}"""
    manifest = file_handler.read_json(manifest_path)
    result = SchemaValidator.validate("manifest", manifest)
    root = Path(manifest_path).parent
    mismatches = []
    for entry in manifest.get("files", []):
        target = root / entry["path"]
        if not target.exists() or file_handler.sha256(str(target)) != entry["sha256"]:
            mismatches.append(entry["path"])
    return {"valid": result["valid"] and not mismatches, "mismatches": mismatches, "schema": result}
