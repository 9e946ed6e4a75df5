"""
Closed-form profile families: power, constant and divisor-bounded.
"""

import logging
from typing import Literal, Optional

import numpy as np
from pydantic import Field, model_validator

from arith_core import ArithTables, build_tables, safe_log_array, trial_divisors
from .base_profile import ApproxProfile, FRange, ProfileParams

logger = logging.getLogger(__name__)


class PowerParams(ProfileParams):
    tau: float = Field(..., gt=1.0)


class PowerProfile(ApproxProfile):
    """f(n) = n^(1 - tau), so that eps_n = n^(-tau)."""

    family = "power"
    f_range = FRange.EXTENDED
    is_monotone = True
    params_model = PowerParams

    def _f_array(self, ns: np.ndarray) -> np.ndarray:
        return np.power(ns.astype(np.float64), 1.0 - self.params.tau)


class ConstantParams(ProfileParams):
    value: float = Field(..., ge=0.0, le=0.5)


class ConstantProfile(ApproxProfile):
    """f(n) = value for every n."""

    family = "constant"
    f_range = FRange.STANDARD
    is_monotone = True
    params_model = ConstantParams

    def _f_array(self, ns: np.ndarray) -> np.ndarray:
        return np.full(ns.shape, float(self.params.value))


class DivisorBoundedParams(ProfileParams):
    base: Literal["constant", "power"] = "constant"
    value: Optional[float] = Field(None, ge=0.0, le=0.5)
    tau: Optional[float] = Field(None, gt=1.0)
    eps: float = Field(0.5, gt=0.0)

    @model_validator(mode="after")
    def _base_parameter_present(self):
        if self.base == "constant" and self.value is None:
            raise ValueError("base 'constant' needs 'value'")
        if self.base == "power" and self.tau is None:
            raise ValueError("base 'power' needs 'tau'")
        return self


DIVISOR_TABLES: Optional[ArithTables] = None


def divisor_counts(ns: np.ndarray) -> np.ndarray:
    """d(n) for each n, read from sieved ArithTables.

    Dense requests (re)build the shared tables up to max(ns); a few large n
    beyond the current tables fall back to trial division.
    """
    global DIVISOR_TABLES
    if len(ns) == 0:
        return np.zeros(0, dtype=np.int64)
    top = int(ns.max())
    if DIVISOR_TABLES is None or top > DIVISOR_TABLES.limit:
        if len(ns) < 64 or len(ns) * 4 < top:
            return np.array([len(trial_divisors(int(n))) for n in ns], dtype=np.int64)
        DIVISOR_TABLES = build_tables(top)
    return DIVISOR_TABLES.divisors[ns].astype(np.int64)


class DivisorBoundedProfile(ApproxProfile):
    """A base value restricted to {n : d(n) <= log^(1+eps) n}, a density-one set."""

    family = "divisor-bounded"
    params_model = DivisorBoundedParams

    def __init__(self, params: DivisorBoundedParams):
        super().__init__(params)
        self.f_range = FRange.STANDARD if params.base == "constant" else FRange.EXTENDED

    def support_mask(self, ns: np.ndarray) -> np.ndarray:
        """True where n belongs to the divisor-bounded support."""
        logs = safe_log_array(ns)
        return divisor_counts(ns) <= np.power(logs, 1.0 + self.params.eps)

    def _f_array(self, ns: np.ndarray) -> np.ndarray:
        if self.params.base == "constant":
            base = np.full(ns.shape, float(self.params.value))
        else:
            base = np.power(ns.astype(np.float64), 1.0 - self.params.tau)
        return np.where(self.support_mask(ns), base, 0.0)
