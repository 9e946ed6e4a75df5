"""
Tabulated profiles: inline tables and plain-text table files.

File format, one entry per line:

    n f(n) theta(n)

with n strictly increasing. Blank lines and lines starting with '#' are
skipped. Any n not listed has f(n) = 0 and theta(n) = 0.
"""

import logging
from pathlib import Path
from typing import Dict, Tuple

import numpy as np
from pydantic import Field, field_validator

from errors import ValidationError
from .base_profile import ApproxProfile, FRange, ProfileParams

logger = logging.getLogger(__name__)


class TableParams(ProfileParams):
    values: Dict[int, Tuple[float, float]] = Field(default_factory=dict)
    f_range: FRange = FRange.STANDARD

    @field_validator("values")
    @classmethod
    def _positive_keys(cls, values):
        bad = [n for n in values if n < 1]
        if bad:
            raise ValueError(f"table indices must be >= 1 (got {bad[:5]})")
        return values


class TableProfile(ApproxProfile):
    """Profile given by an explicit table of (f(n), theta(n))."""

    family = "table"
    params_model = TableParams

    def __init__(self, params: TableParams):
        super().__init__(params)
        self.f_range = params.f_range
        self._index = np.array(sorted(params.values), dtype=np.int64)
        self._f = np.array([params.values[n][0] for n in self._index], dtype=np.float64)
        self._theta = np.array([params.values[n][1] for n in self._index], dtype=np.float64)

    def _lookup(self, ns: np.ndarray, column: np.ndarray) -> np.ndarray:
        out = np.zeros(ns.shape, dtype=np.float64)
        if len(self._index) == 0:
            return out
        pos = np.searchsorted(self._index, ns)
        pos_clipped = np.minimum(pos, len(self._index) - 1)
        hit = self._index[pos_clipped] == ns
        out[hit] = column[pos_clipped[hit]]
        return out

    def _f_array(self, ns: np.ndarray) -> np.ndarray:
        return self._lookup(ns, self._f)

    def _theta_array(self, ns: np.ndarray) -> np.ndarray:
        return self._lookup(ns, self._theta)


def load_table_file(path: Path) -> Dict[int, Tuple[float, float]]:
    """Parse a table file into {n: (f, theta)}."""
    path = Path(path)
    if not path.exists():
        raise ValidationError(f"Profile table file not found: {path}", {"path": str(path)})

    values: Dict[int, Tuple[float, float]] = {}
    last_n = 0
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 3:
                raise ValidationError(
                    f"{path}:{lineno}: expected 'n f theta', got {line!r}",
                    {"line": lineno},
                )
            try:
                n, f_val, theta_val = int(parts[0]), float(parts[1]), float(parts[2])
            except ValueError:
                raise ValidationError(f"{path}:{lineno}: cannot parse {line!r}", {"line": lineno})
            if n <= last_n:
                raise ValidationError(
                    f"{path}:{lineno}: n={n} is not strictly increasing (previous {last_n})",
                    {"line": lineno, "n": n},
                )
            values[n] = (f_val, theta_val)
            last_n = n

    logger.info(f"Loaded {len(values)} profile entries from {path}")
    return values


class UserFileParams(ProfileParams):
    path: Path
    f_range: FRange = FRange.STANDARD


class UserFileProfile(TableProfile):
    """Table profile read from a user-supplied file."""

    family = "user-file"
    params_model = UserFileParams

    def __init__(self, params: UserFileParams):
        table = TableParams(
            values=load_table_file(params.path),
            f_range=params.f_range,
        )
        super().__init__(table)
        self.params = params
