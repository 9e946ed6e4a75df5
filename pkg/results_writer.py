"""
CSV/JSON result files and run manifests.
"""

import csv
import json
import logging
import platform
from datetime import datetime
from importlib import metadata
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional

import numpy as np

import config
from errors import LabError

logger = logging.getLogger(__name__)

PACKAGES = ("numpy", "joblib", "pydantic", "python-dotenv", "click", "rich")


def format_cell(value: Any) -> str:
    """CSV cell text; floats round-trip through repr."""
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, np.integer):
        return str(int(value))
    return str(value)


def _json_default(value: Any):
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, Path):
        return str(value)
    raise TypeError(f"Object of type {type(value).__name__} is not JSON serializable")


def package_versions() -> Dict[str, Optional[str]]:
    versions = {}
    for name in PACKAGES:
        try:
            versions[name] = metadata.version(name)
        except metadata.PackageNotFoundError:
            versions[name] = None
    return versions


class ResultsWriter:
    """Write one command's artifacts under <output_dir>/<command>/."""

    # Column headers for each table
    SIEVE_HEADERS = ["n", "totient", "divisors", "mobius", "smallest_factor"]
    MEASURE_HEADERS = ["n", "f", "theta", "reduced", "pieces", "measure", "formula"]
    INTERSECT_HEADERS = ["n", "m", "exact", "series", "closed_form", "truncation_M", "tail_bound", "full_fraction_bound"]
    COUNT_HEADERS = ["index", "x", "N", "S", "E_N", "ratio"]
    C_ALPHA_HEADERS = ["alpha", "N", "c_alpha"]
    BOX_HEADERS = ["N", "j", "cells", "r_min", "measure"]
    CRITERIA_HEADERS = ["N", "quotient", "aux_quotient", "bound_ok"]
    BOUNDS_HEADERS = ["family", "x", "value"]
    BATTERY_HEADERS = ["name", "passed", "cases", "detail"]

    def __init__(self, output_dir: Path, command: str, formats: Iterable[str] = ("csv", "json")):
        self.directory = Path(output_dir) / command
        self.command = command
        self.formats = set(formats)
        self.files: List[str] = []

    def _prepare(self):
        self.directory.mkdir(parents=True, exist_ok=True)

    def write_csv(self, name: str, headers: List[str], rows: Iterable[Dict[str, Any]]) -> Optional[Path]:
        """Write rows under fixed headers; missing keys become empty cells."""
        if "csv" not in self.formats:
            return None
        self._prepare()
        path = self.directory / f"{name}.csv"
        with open(path, "w", newline="", encoding="utf-8") as handle:
            writer = csv.DictWriter(handle, fieldnames=headers, lineterminator="\n")
            writer.writeheader()
            for row in rows:
                writer.writerow({h: format_cell(row.get(h)) for h in headers})
        self.files.append(path.name)
        logger.info(f"Wrote {path}")
        return path

    def write_json(self, name: str, payload: Any) -> Optional[Path]:
        if "json" not in self.formats:
            return None
        self._prepare()
        path = self.directory / f"{name}.json"
        with open(path, "w", encoding="utf-8") as handle:
            json.dump(payload, handle, indent=2, sort_keys=True, default=_json_default)
            handle.write("\n")
        self.files.append(path.name)
        logger.info(f"Wrote {path}")
        return path

    def write_manifest(self, run_config, started_at: datetime, wall_time: float, status: str = "ok") -> Path:
        """Everything needed to re-execute the run. Always written."""
        self._prepare()
        manifest = {
            "schema_version": config.SCHEMA_VERSION,
            "app_version": config.APP_VERSION,
            "command": self.command,
            "status": status,
            "config": run_config.to_json() if run_config is not None else None,
            "config_sha256": run_config.sha256() if run_config is not None else None,
            "seed": run_config.seed if run_config is not None else None,
            "rng_algorithm": config.RNG_ALGORITHM,
            "budgets": config.budgets(),
            "packages": package_versions(),
            "python_version": platform.python_version(),
            "platform": platform.platform(),
            "started_at": started_at.isoformat(),
            "wall_time_seconds": wall_time,
            "files": sorted(self.files),
        }
        path = self.directory / "manifest.json"
        with open(path, "w", encoding="utf-8") as handle:
            json.dump(manifest, handle, indent=2, sort_keys=True, default=_json_default)
            handle.write("\n")
        return path

    def write_error(self, error: LabError) -> Path:
        """Machine-readable error report."""
        self._prepare()
        path = self.directory / "error.json"
        with open(path, "w", encoding="utf-8") as handle:
            json.dump(error.to_dict(), handle, indent=2, sort_keys=True, default=_json_default)
            handle.write("\n")
        logger.info(f"Wrote {path}")
        return path
