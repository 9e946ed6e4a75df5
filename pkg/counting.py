"""
Solution counting S(f, theta, x, N) and its Monte Carlo experiments.

S counts pairs (n, m) with n <= N, (m, n) = 1 and
||x - (m + theta(n))/n|| < f(n)/n. Each n only scans the O(f(n) + 1)
integers nearest to x n - theta(n).
"""

import logging
import math
from dataclasses import asdict, dataclass
from functools import partial
from typing import List, Optional, Sequence

import numpy as np

from arith_core import ArithTables
from errors import ValidationError
from fourier_measure import divisor_moment_sum
from profiles import ApproxProfile
from workers import chunk_ranges, pool_map, resolve_workers

logger = logging.getLogger(__name__)


@dataclass
class CountReport:
    """One evaluation of the counting function."""
    x: float
    N: int
    S: int
    E_N: float
    ratio: Optional[float]

    def to_dict(self) -> dict:
        return asdict(self)


def expected_count(N: int, profile: ApproxProfile, tables: ArithTables) -> float:
    """E_N = sum_{n<=N} 2 (f(n)/n) phi(n)."""
    tables.check(N)
    f = profile.f_values(N)[1:]
    ns = np.arange(1, N + 1, dtype=np.float64)
    phi = tables.totient[1 : N + 1].astype(np.float64)
    return math.fsum((2.0 * f / ns * phi).tolist())


class CountingKernel:
    """Candidate layout for one (N, profile), reusable across sample points."""

    def __init__(self, N: int, profile: ApproxProfile, tables: ArithTables):
        tables.check(N)
        self.N = N
        self.E_N = expected_count(N, profile, tables)

        f_all = profile.f_values(N)[1:]
        theta_all = profile.theta_values(N)[1:]
        active = f_all > 0
        self.ns = np.arange(1, N + 1, dtype=np.int64)[active]
        self.f = f_all[active]
        self.theta = theta_all[active]

        half_width = np.ceil(self.f).astype(np.int64) + 1
        lengths = 2 * half_width + 1
        starts = np.cumsum(lengths) - lengths
        total = int(lengths.sum())
        self.owner = np.repeat(np.arange(len(self.ns)), lengths)
        self.offsets = (
            np.arange(total, dtype=np.int64)
            - np.repeat(starts, lengths)
            - np.repeat(half_width, lengths)
        )
        self.moduli = self.ns[self.owner]
        # residues can repeat inside one window only when 2 f(n) >= n
        self.needs_dedupe = bool((2.0 * self.f >= self.ns).any())
        logger.debug(f"Counting kernel N={N}: {len(self.ns)} active n, {total} candidates")

    def count(self, x: float) -> int:
        """S(f, theta, x, N)."""
        if len(self.ns) == 0:
            return 0
        y = x * self.ns - self.theta
        candidates = np.floor(y).astype(np.int64)[self.owner] + self.offsets
        close = np.abs(y[self.owner] - candidates) < self.f[self.owner]
        residues = np.mod(candidates, self.moduli)
        hits = close & (np.gcd(residues, self.moduli) == 1)
        if not self.needs_dedupe:
            return int(hits.sum())
        keys = self.owner[hits].astype(np.int64) * (self.N + 1) + residues[hits]
        return int(len(np.unique(keys)))

    def report(self, x: float) -> CountReport:
        S = self.count(x)
        ratio = S / self.E_N if self.E_N > 0 else None
        return CountReport(x=float(x), N=self.N, S=S, E_N=self.E_N, ratio=ratio)


def count_solutions(x: float, N: int, profile: ApproxProfile, tables: ArithTables) -> CountReport:
    """Exact S together with E_N at the point x."""
    return CountingKernel(N, profile, tables).report(x)


def variance_budget(N: int, profile: ApproxProfile, tables: ArithTables) -> float:
    """Constant-free variance bound sum_{n<=N} eps_n n d^3(n) log^2 n."""
    return divisor_moment_sum(N, profile, tables)


def markov_bound(N: int, beta: float, profile: ApproxProfile, tables: ArithTables) -> float:
    """variance_budget / beta^2, the Markov estimate of the tail fraction."""
    if beta <= 0:
        raise ValidationError(f"beta must be positive (got {beta})")
    return variance_budget(N, profile, tables) / beta ** 2


def sample_point(seed: int, index: int) -> float:
    """Uniform x in [0, 1) from the stream keyed by (seed, index)."""
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, index])))
    return float(rng.random())


def _count_batch(indices: range, seed: int, kernel: CountingKernel) -> List[CountReport]:
    return [kernel.report(sample_point(seed, i)) for i in indices]


def sample_counts(
    N: int,
    samples: int,
    seed: int,
    profile: ApproxProfile,
    tables: ArithTables,
    workers: Optional[int] = None,
) -> List[CountReport]:
    """CountReports at `samples` uniform points, in sample order."""
    if samples < 1:
        raise ValidationError(f"samples must be >= 1 (got {samples})")
    if seed < 0:
        raise ValidationError(f"seed must be >= 0 (got {seed})")
    kernel = CountingKernel(N, profile, tables)
    n_workers = resolve_workers(workers)
    batches = chunk_ranges(0, samples - 1, n_workers * 4)
    results = pool_map(partial(_count_batch, seed=seed, kernel=kernel), batches, n_workers)
    reports = [r for batch in results for r in batch]
    logger.info(f"Sampled {len(reports)} counts at N={N} (E_N={kernel.E_N:.3f})")
    return reports


def tail_fraction(
    N: int,
    beta: float,
    samples: int,
    seed: int,
    profile: ApproxProfile,
    tables: ArithTables,
    workers: Optional[int] = None,
) -> float:
    """Fraction of sampled x with |S - E_N| >= beta."""
    if beta <= 0:
        raise ValidationError(f"beta must be positive (got {beta})")
    return tail_fraction_of(sample_counts(N, samples, seed, profile, tables, workers), beta)


def tail_fraction_of(reports: Sequence[CountReport], beta: float) -> float:
    """Fraction of an existing batch with |S - E_N| >= beta."""
    if beta <= 0:
        raise ValidationError(f"beta must be positive (got {beta})")
    if not reports:
        raise ValidationError("tail fraction needs at least one report")
    hits = sum(1 for r in reports if abs(r.S - r.E_N) >= beta)
    return hits / len(reports)


def summarize_counts(reports: Sequence[CountReport]) -> dict:
    """Median, mean and deciles of S/E_N over a batch."""
    ratios = np.array([r.ratio for r in reports if r.ratio is not None], dtype=np.float64)
    counts = np.array([r.S for r in reports], dtype=np.float64)
    summary = {
        "samples": len(reports),
        "N": reports[0].N if reports else None,
        "E_N": reports[0].E_N if reports else None,
        "mean_S": float(counts.mean()) if len(counts) else None,
    }
    if len(ratios):
        summary.update({
            "median_ratio": float(np.median(ratios)),
            "mean_ratio": float(ratios.mean()),
            "deciles": [float(q) for q in np.percentile(ratios, np.arange(10, 100, 10))],
        })
    else:
        summary.update({"median_ratio": None, "mean_ratio": None, "deciles": []})
    return summary
