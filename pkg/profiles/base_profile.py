"""
Base class for approximation profiles (f, theta).
"""

import copy
import logging
from abc import ABC, abstractmethod
from enum import Enum
from typing import Any, Dict, Optional

import numpy as np
from pydantic import BaseModel, Field

from errors import ValidationError

logger = logging.getLogger(__name__)


class FRange(Enum):
    """Declared range of the approximation function."""
    STANDARD = "standard"    # 0 <= f(n) <= 1/2
    EXTENDED = "extended"    # 0 <= f(n) < n/2 for n >= 2
    UNBOUNDED = "unbounded"  # 0 <= f(n)


class ProfileParams(BaseModel):
    """Parameters shared by every family: a constant inhomogeneous shift."""
    theta: float = Field(0.0, ge=0.0, le=0.5)


class ApproxProfile(ABC):
    """An approximation function f and shift theta as evaluable sequences.

    Subclasses implement `_f_array` (and optionally `_theta_array`) on an
    integer array of n >= 1. Values are range-checked on every evaluation;
    dense evaluations up to N are cached.
    """

    family: str = "base"
    f_range: FRange = FRange.STANDARD
    is_monotone: bool = False  # f(n)/n nonincreasing in n
    params_model = ProfileParams

    def __init__(self, params: ProfileParams):
        self.params = params
        self._theta_override: Optional[float] = None
        self._f_cache: Optional[np.ndarray] = None
        self._theta_cache: Optional[np.ndarray] = None

    @abstractmethod
    def _f_array(self, ns: np.ndarray) -> np.ndarray:
        """f evaluated at each n in `ns` (int64, all >= 1)."""
        pass

    def _theta_array(self, ns: np.ndarray) -> np.ndarray:
        """theta evaluated at each n; constant by default."""
        return np.full(ns.shape, float(self.params.theta))

    def _check_range(self, ns: np.ndarray, values: np.ndarray, thetas: np.ndarray):
        """Reject values outside the declared range, naming the first offender."""
        bad = ~np.isfinite(values) | (values < 0)
        if self.f_range is FRange.STANDARD:
            bad |= values > 0.5
        elif self.f_range is FRange.EXTENDED:
            bad |= (ns >= 2) & (values >= ns / 2.0)
        if bad.any():
            i = int(np.argmax(bad))
            raise ValidationError(
                f"{self.family}: f({int(ns[i])}) = {values[i]!r} outside "
                f"{self.f_range.value} range",
                {"n": int(ns[i]), "value": float(values[i]), "range": self.f_range.value},
            )
        bad_theta = ~np.isfinite(thetas) | (thetas < 0) | (thetas > 0.5)
        if bad_theta.any():
            i = int(np.argmax(bad_theta))
            raise ValidationError(
                f"{self.family}: theta({int(ns[i])}) = {thetas[i]!r} outside [0, 1/2]",
                {"n": int(ns[i]), "value": float(thetas[i])},
            )

    def _evaluate(self, ns: np.ndarray):
        values = np.asarray(self._f_array(ns), dtype=np.float64)
        if self._theta_override is not None:
            thetas = np.full(ns.shape, self._theta_override)
        else:
            thetas = np.asarray(self._theta_array(ns), dtype=np.float64)
        self._check_range(ns, values, thetas)
        return values, thetas

    def f(self, n: int) -> float:
        """f(n)."""
        if n < 1:
            raise ValidationError(f"n must be >= 1 (got {n})")
        if self._f_cache is not None and n < len(self._f_cache):
            return float(self._f_cache[n])
        values, _ = self._evaluate(np.array([n], dtype=np.int64))
        return float(values[0])

    def theta(self, n: int) -> float:
        """theta(n)."""
        if n < 1:
            raise ValidationError(f"n must be >= 1 (got {n})")
        if self._theta_cache is not None and n < len(self._theta_cache):
            return float(self._theta_cache[n])
        _, thetas = self._evaluate(np.array([n], dtype=np.int64))
        return float(thetas[0])

    def epsilon(self, n: int) -> float:
        """eps_n = f(n)/n, the arc radius."""
        return self.f(n) / n

    def _fill_cache(self, N: int):
        if self._f_cache is not None and len(self._f_cache) > N:
            return
        ns = np.arange(1, N + 1, dtype=np.int64)
        values, thetas = self._evaluate(ns)
        f_cache = np.concatenate([[0.0], values])
        theta_cache = np.concatenate([[0.0], thetas])
        f_cache.setflags(write=False)
        theta_cache.setflags(write=False)
        self._f_cache, self._theta_cache = f_cache, theta_cache
        logger.debug(f"Cached {self.family} profile values up to {N}")

    def f_values(self, N: int) -> np.ndarray:
        """Dense read-only array of f(0..N); index 0 holds 0."""
        self._fill_cache(N)
        return self._f_cache[: N + 1]

    def theta_values(self, N: int) -> np.ndarray:
        """Dense read-only array of theta(0..N); index 0 holds 0."""
        self._fill_cache(N)
        return self._theta_cache[: N + 1]

    def require_standard(self, n: int):
        """Reject n where f(n) > 1/2 (arcs of A_n would overlap)."""
        value = self.f(n)
        if value > 0.5:
            raise ValidationError(
                f"f({n}) = {value!r} exceeds 1/2; this operation needs disjoint arcs",
                {"n": n, "value": value},
            )

    def with_theta(self, theta: float) -> "ApproxProfile":
        """Copy of this profile with the shift replaced by a constant."""
        if not 0.0 <= theta <= 0.5:
            raise ValidationError(f"theta must lie in [0, 1/2] (got {theta})")
        clone = copy.copy(self)
        clone._theta_override = float(theta)
        clone._f_cache = None
        clone._theta_cache = None
        return clone

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary for manifests."""
        return {
            "family": self.family,
            "params": self.params.model_dump(mode="json"),
            "f_range": self.f_range.value,
            "theta_override": self._theta_override,
        }

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {self.params.model_dump()}>"
