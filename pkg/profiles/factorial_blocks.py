"""
Dyadic-block example family with factorial support.

The integers are split into blocks D_k = [2^k, 2^(k+1)). Inside D_k the
function is log^a(n)/n on multiples of m(k)! and zero elsewhere, for a
nondecreasing schedule m(k).
"""

import logging
import math
from typing import List, Optional

import numpy as np
from pydantic import Field, model_validator

from .base_profile import ApproxProfile, FRange, ProfileParams

logger = logging.getLogger(__name__)


class FactorialBlockParams(ProfileParams):
    cap: Optional[int] = Field(None, ge=0)  # m(k) = min(k, cap)
    schedule: Optional[List[int]] = None  # explicit m(0), m(1), ...; last value repeats
    exponent: float = Field(10.0, ge=0.0)

    @model_validator(mode="after")
    def _one_schedule(self):
        if (self.cap is None) == (self.schedule is None):
            raise ValueError("give exactly one of 'cap' or 'schedule'")
        if self.schedule is not None:
            if not self.schedule:
                raise ValueError("schedule must not be empty")
            if any(m < 0 for m in self.schedule):
                raise ValueError("schedule values must be >= 0")
            if any(b < a for a, b in zip(self.schedule, self.schedule[1:])):
                raise ValueError("schedule must be nondecreasing")
        return self


class FactorialBlockProfile(ApproxProfile):
    """f(n) = log^a(n)/n on multiples of m(k)! inside D_k, else 0."""

    family = "factorial-blocks"
    f_range = FRange.UNBOUNDED
    params_model = FactorialBlockParams

    def m(self, k: int) -> int:
        """Schedule value for block k."""
        if self.params.cap is not None:
            return min(k, self.params.cap)
        schedule = self.params.schedule
        return schedule[min(k, len(schedule) - 1)]

    @staticmethod
    def block_of(n: int) -> int:
        """k with n in D_k."""
        return n.bit_length() - 1

    def is_supported(self, n: int) -> bool:
        return n % math.factorial(self.m(self.block_of(n))) == 0

    def _f_array(self, ns: np.ndarray) -> np.ndarray:
        out = np.zeros(ns.shape, dtype=np.float64)
        blocks = np.floor(np.log2(ns.astype(np.float64))).astype(np.int64)
        # float log2 can misplace exact powers of two
        blocks = np.where(np.left_shift(1, blocks + 1) <= ns, blocks + 1, blocks)
        blocks = np.where(np.left_shift(1, blocks) > ns, blocks - 1, blocks)
        for k in np.unique(blocks):
            k = int(k)
            modulus = math.factorial(self.m(k))
            in_block = blocks == k
            if modulus >= 2 ** (k + 1):
                continue
            supported = in_block & (ns % modulus == 0)
            n_sup = ns[supported].astype(np.float64)
            out[supported] = np.power(np.log(n_sup), self.params.exponent) / n_sup
        return out
