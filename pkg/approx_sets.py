"""
Finite unions of arcs on the circle R/Z and the approximation sets A_n.

An ArcSet is kept in canonical form: disjoint pieces [a, b) inside [0, 1],
sorted by left endpoint. An arc crossing 1 = 0 is stored as two pieces,
[a, 1) and [0, b).
"""

import logging
import math
from dataclasses import dataclass
from typing import Iterable, List, Sequence, Tuple

import numpy as np

import config
from arith_core import ArithTables
from profiles import ApproxProfile

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ArcSet:
    """Canonical finite union of arcs."""
    starts: np.ndarray
    ends: np.ndarray
    total_measure: float

    @property
    def arcs(self) -> List[Tuple[float, float]]:
        return list(zip(self.starts.tolist(), self.ends.tolist()))

    def __len__(self) -> int:
        return len(self.starts)

    @property
    def is_empty(self) -> bool:
        return len(self.starts) == 0

    def to_dict(self) -> dict:
        return {"arcs": self.arcs, "measure": self.total_measure}


def _freeze(starts: np.ndarray, ends: np.ndarray) -> ArcSet:
    starts = np.ascontiguousarray(starts, dtype=np.float64)
    ends = np.ascontiguousarray(ends, dtype=np.float64)
    starts.setflags(write=False)
    ends.setflags(write=False)
    total = math.fsum((ends - starts).tolist())
    return ArcSet(starts=starts, ends=ends, total_measure=min(1.0, max(0.0, total)))


EMPTY = _freeze(np.zeros(0), np.zeros(0))
FULL_CIRCLE = _freeze(np.array([0.0]), np.array([1.0]))


def _merge_sorted(starts: np.ndarray, ends: np.ndarray) -> ArcSet:
    """Merge intervals already sorted by start into disjoint pieces."""
    if len(starts) == 0:
        return EMPTY
    running_end = np.maximum.accumulate(ends)
    new_group = np.empty(len(starts), dtype=bool)
    new_group[0] = True
    new_group[1:] = starts[1:] > running_end[:-1] + config.MERGE_EPS
    first = np.flatnonzero(new_group)
    last = np.append(first[1:] - 1, len(starts) - 1)
    merged_starts = starts[first]
    merged_ends = running_end[last]
    return _freeze(merged_starts, merged_ends)


def canonicalize(lo: Iterable[float], hi: Iterable[float]) -> ArcSet:
    """Canonical ArcSet for arcs [lo_i, hi_i) given as real-line intervals.

    Arcs of length >= 1 cover the circle; the rest are reduced mod 1 and
    split at 0 when they wrap.
    """
    lo = np.asarray(lo, dtype=np.float64).ravel()
    hi = np.asarray(hi, dtype=np.float64).ravel()
    lengths = hi - lo
    keep = lengths > 0
    lo, hi, lengths = lo[keep], hi[keep], lengths[keep]
    if len(lo) == 0:
        return EMPTY
    if (lengths >= 1.0).any():
        return FULL_CIRCLE

    a = np.mod(lo, 1.0)
    b = a + lengths
    wraps = b > 1.0
    starts = np.concatenate([a, np.zeros(int(wraps.sum()))])
    ends = np.concatenate([np.minimum(b, 1.0), b[wraps] - 1.0])
    nonempty = ends > starts
    starts, ends = starts[nonempty], ends[nonempty]
    order = np.argsort(starts, kind="stable")
    return _merge_sorted(starts[order], ends[order])


def clip(lo: Iterable[float], hi: Iterable[float]) -> ArcSet:
    """Non-circular view: intervals restricted to [0, 1] without wrapping."""
    lo = np.clip(np.asarray(lo, dtype=np.float64), 0.0, 1.0)
    hi = np.clip(np.asarray(hi, dtype=np.float64), 0.0, 1.0)
    keep = hi > lo
    lo, hi = lo[keep], hi[keep]
    order = np.argsort(lo, kind="stable")
    return _merge_sorted(lo[order], hi[order])


def arc_centers(n: int, theta: float, reduced: bool) -> np.ndarray:
    """Centers (m + theta)/n for m in [1, n], optionally only (m, n) = 1."""
    m = np.arange(1, n + 1, dtype=np.int64)
    if reduced:
        m = m[np.gcd(m, n) == 1]
    return (m + theta) / n


def arcs_for(
    n: int,
    profile: ApproxProfile,
    reduced: bool,
    tables: ArithTables,
    clipped: bool = False,
) -> ArcSet:
    """A_n (reduced) or the full-fraction set (not reduced) as an ArcSet."""
    tables.check(n)
    radius = profile.f(n) / n
    if radius <= 0:
        return EMPTY
    centers = arc_centers(n, profile.theta(n), reduced)
    if clipped:
        return clip(centers - radius, centers + radius)
    if radius >= 0.5:
        return FULL_CIRCLE
    return canonicalize(centers - radius, centers + radius)


def measure(arc_set: ArcSet) -> float:
    """Lebesgue measure of a canonical set."""
    return arc_set.total_measure


def complement_measure(arc_set: ArcSet) -> float:
    return 1.0 - arc_set.total_measure


def _overlaps(a: ArcSet, b: ArcSet) -> Tuple[np.ndarray, np.ndarray]:
    """Pieces of a ∩ b, one per overlapping pair, in sorted order."""
    if a.is_empty or b.is_empty:
        return np.zeros(0), np.zeros(0)
    j_lo = np.searchsorted(b.ends, a.starts, side="right")
    j_hi = np.searchsorted(b.starts, a.ends, side="left")
    counts = np.maximum(j_hi - j_lo, 0)
    total = int(counts.sum())
    if total == 0:
        return np.zeros(0), np.zeros(0)
    i_idx = np.repeat(np.arange(len(a.starts)), counts)
    offsets = np.arange(total) - np.repeat(np.cumsum(counts) - counts, counts)
    j_idx = np.repeat(j_lo, counts) + offsets
    lo = np.maximum(a.starts[i_idx], b.starts[j_idx])
    hi = np.minimum(a.ends[i_idx], b.ends[j_idx])
    keep = hi > lo
    return lo[keep], hi[keep]


def intersect(a: ArcSet, b: ArcSet) -> ArcSet:
    """Set intersection of two canonical ArcSets."""
    lo, hi = _overlaps(a, b)
    if len(lo) == 0:
        return EMPTY
    order = np.argsort(lo, kind="stable")
    return _merge_sorted(lo[order], hi[order])


def intersection_measure(a: ArcSet, b: ArcSet) -> float:
    """measure(intersect(a, b)) without building the result."""
    lo, hi = _overlaps(a, b)
    return min(1.0, math.fsum((hi - lo).tolist()))


def union(sets: Sequence[ArcSet]) -> ArcSet:
    """Canonical union of canonical ArcSets."""
    sets = [s for s in sets if not s.is_empty]
    if not sets:
        return EMPTY
    starts = np.concatenate([s.starts for s in sets])
    ends = np.concatenate([s.ends for s in sets])
    order = np.argsort(starts, kind="stable")
    return _merge_sorted(starts[order], ends[order])


def union_measure(sets: Sequence[ArcSet]) -> float:
    """Measure of the union by one merged sweep."""
    return union(sets).total_measure


def contains(arc_set: ArcSet, x: float) -> bool:
    """True iff x mod 1 lies strictly inside an arc of the set."""
    if arc_set.is_empty:
        return False
    x = x % 1.0
    if x == 1.0:
        # tiny negative x rounds up to 1 under %
        x = 0.0
    starts = arc_set.starts
    ends = arc_set.ends
    i = int(np.searchsorted(starts, x, side="right")) - 1
    if i >= 0 and starts[i] < x < ends[i]:
        return True
    # 0 is interior when a piece ends at 1 and another starts at 0
    if x == 0.0:
        return bool(starts[0] == 0.0 and ends[-1] == 1.0)
    return False
