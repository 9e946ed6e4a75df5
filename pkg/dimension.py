"""
Hausdorff-dimension estimators for limsup sets of approximation arcs.

Two finite-data views are offered: the counting formula built on
C_alpha(N) = #{n <= N : f(n)/n >= n^(-alpha)}, and box counting on the
union of arcs over a dyadic window. Both estimate; neither certifies.
"""

import logging
import math
from dataclasses import asdict, dataclass, field
from functools import partial
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np

import config
from approx_sets import ArcSet, arcs_for, union
from arith_core import ArithTables
from errors import DegenerateInputError, ValidationError
from profiles import ApproxProfile
from workers import pool_map

logger = logging.getLogger(__name__)

REL_SLACK = 1e-12


def default_alpha_grid(top: float = 6.0, step: float = 0.05) -> List[float]:
    """1, 1 + step, ..., top, rounded so that integer alphas are exact."""
    count = int(round((top - 1.0) / step))
    return [round(1.0 + step * i, 10) for i in range(count + 1)]


def dyadic_schedule(lo_exp: int, hi_exp: int) -> List[int]:
    """2^lo_exp, ..., 2^hi_exp."""
    return [1 << j for j in range(lo_exp, hi_exp + 1)]


@dataclass
class DimensionReport:
    """Estimates produced by counting_dimension (and optionally box counting)."""
    alpha_grid: List[float]
    checkpoints: List[int]
    c_alpha_at_checkpoints: Dict[float, List[int]]
    delta_hat: Dict[float, float]
    kappa_hat: Dict[float, float]
    counting_dimension: float
    lower_order_hat: Optional[float] = None
    closed_form_dimension: Optional[float] = None
    box_count_slope: Optional[float] = None
    box_count_points: List[dict] = field(default_factory=list)
    note: str = (
        "finite-N estimates over a truncation of the limsup set; "
        "not a proof of the true dimension"
    )

    def to_dict(self) -> dict:
        data = asdict(self)
        for key in ("c_alpha_at_checkpoints", "delta_hat", "kappa_hat"):
            data[key] = {repr(a): v for a, v in data[key].items()}
        return data


def _qualifying(alpha: float, N: int, profile: ApproxProfile) -> np.ndarray:
    """Mask over n = 1..N of eps_n >= n^(-alpha)."""
    ns = np.arange(1, N + 1, dtype=np.float64)
    eps = profile.f_values(N)[1:] / ns
    return (eps > 0) & (eps >= np.power(ns, -alpha) * (1.0 - REL_SLACK))


def c_alpha(alpha: float, N: int, profile: ApproxProfile) -> int:
    """C_alpha(N) by direct scan."""
    if alpha < 1:
        raise ValidationError(f"alpha must be >= 1 (got {alpha})")
    if N < 1:
        raise ValidationError(f"N must be >= 1 (got {N})")
    return int(_qualifying(alpha, N, profile).sum())


def _is_power_of_two(n: int) -> bool:
    return n >= 1 and n & (n - 1) == 0


def closed_form_dimension(lower: float) -> float:
    """min{1, 2/(lambda + 1)} for a monotone profile of lower order lambda."""
    if lower + 1 <= 0:
        return 1.0
    return min(1.0, 2.0 / (lower + 1.0))


def lower_order(profile: ApproxProfile, N_min: int, N_max: int) -> float:
    """min over n in [N_min, N_max] with f(n) > 0 of -log f(n) / log n."""
    if N_min < 2:
        raise ValidationError(f"N_min must be >= 2 (got {N_min})")
    if N_max < N_min:
        raise ValidationError(f"N_max must be >= N_min (got {N_max} < {N_min})")
    f = profile.f_values(N_max)[N_min:]
    ns = np.arange(N_min, N_max + 1, dtype=np.float64)
    positive = f > 0
    if not positive.any():
        raise DegenerateInputError(
            f"f vanishes on [{N_min}, {N_max}]; lower order undefined",
            {"N_min": N_min, "N_max": N_max},
        )
    return float(np.min(-np.log(f[positive]) / np.log(ns[positive])))


def counting_dimension(
    profile: ApproxProfile,
    N_max: int,
    alpha_grid: Sequence[float],
    delta_threshold: Optional[int] = None,
) -> DimensionReport:
    """Counting-formula dimension estimate over an alpha grid."""
    alpha_grid = [float(a) for a in alpha_grid]
    if not alpha_grid:
        raise ValidationError("alpha_grid must not be empty")
    if any(a < 1 for a in alpha_grid):
        raise ValidationError(f"alpha values must be >= 1 (got {alpha_grid})")
    if any(b <= a for a, b in zip(alpha_grid, alpha_grid[1:])):
        raise ValidationError("alpha_grid must be strictly ascending")
    if N_max < 2 or not _is_power_of_two(N_max):
        raise ValidationError(f"N_max must be a power of 2 and >= 2 (got {N_max})")
    threshold = config.DELTA_THRESHOLD if delta_threshold is None else delta_threshold

    top = N_max.bit_length() - 1
    checkpoints = [1 << j for j in range(math.ceil(top / 2), top + 1)]
    quarter = max(1, N_max // 4)

    counts: Dict[float, List[int]] = {}
    delta_hat: Dict[float, float] = {}
    kappa_hat: Dict[float, float] = {}
    for alpha in alpha_grid:
        running = np.cumsum(_qualifying(alpha, N_max, profile))
        at = [int(running[N - 1]) for N in checkpoints]
        counts[alpha] = at
        ratios = [math.log(c) / math.log(N) for c, N in zip(at, checkpoints) if c > 0]
        delta = max(ratios) if ratios else 0.0
        delta_hat[alpha] = delta
        grows = at[-1] >= threshold and at[-1] > int(running[quarter - 1])
        kappa_hat[alpha] = min((1.0 + delta) / alpha, 2.0 / alpha) if grows else 0.0
        logger.debug(f"alpha={alpha}: C={at[-1]}, delta={delta:.4f}, kappa={kappa_hat[alpha]:.4f}")

    report = DimensionReport(
        alpha_grid=alpha_grid,
        checkpoints=checkpoints,
        c_alpha_at_checkpoints=counts,
        delta_hat=delta_hat,
        kappa_hat=kappa_hat,
        counting_dimension=min(1.0, max(kappa_hat.values())),
    )
    if profile.is_monotone:
        try:
            report.lower_order_hat = lower_order(profile, 2, N_max)
            report.closed_form_dimension = closed_form_dimension(report.lower_order_hat)
        except DegenerateInputError:
            logger.warning("Profile vanishes on the window; no lower order reported")
    logger.info(f"Counting-formula dimension: {report.counting_dimension:.4f}")
    return report


def volume_partial_sum(profile: ApproxProfile, s: float, N: int, tables: ArithTables) -> float:
    """sum_{n<=N} eps_n^s phi(n), the s-dimensional volume series."""
    if not 0 < s <= 1:
        raise ValidationError(f"s must lie in (0, 1] (got {s})")
    tables.check(N)
    ns = np.arange(1, N + 1, dtype=np.float64)
    eps = profile.f_values(N)[1:] / ns
    phi = tables.totient[1 : N + 1].astype(np.float64)
    return math.fsum((np.power(eps, s) * phi).tolist())


def default_resolution(r_min: float) -> int:
    """Least j with 2^(-j) <= r_min."""
    return max(0, math.ceil(math.log2(1.0 / r_min) - 1e-9))


def count_cells(arc_set: ArcSet, j: int) -> int:
    """Number of dyadic cells [i 2^-j, (i+1) 2^-j) meeting the set."""
    if arc_set.is_empty:
        return 0
    scale = float(2 ** j)
    first = np.floor(arc_set.starts * scale).astype(np.int64)
    stop = np.ceil(arc_set.ends * scale).astype(np.int64)
    covered_before = np.concatenate([[0], np.maximum.accumulate(stop)[:-1]])
    return int(np.maximum(stop - np.maximum(first, covered_before), 0).sum())


def _box_point(
    N: int,
    profile: ApproxProfile,
    tables: ArithTables,
    reduced: bool,
    window: str,
    resolution_rule: Optional[Callable[[int], int]],
) -> Optional[dict]:
    lo = N // 2 + 1 if window == "block" else 1
    f = profile.f_values(N)
    radii = [(n, f[n] / n) for n in range(lo, N + 1) if f[n] > 0]
    if not radii:
        return None
    r_min = min(r for _, r in radii)
    j = resolution_rule(N) if resolution_rule else default_resolution(r_min)
    covered = union([arcs_for(n, profile, reduced, tables) for n, _ in radii])
    cells = count_cells(covered, j)
    return {"N": N, "j": j, "cells": cells, "r_min": r_min, "measure": covered.total_measure}


def box_count_table(
    profile: ApproxProfile,
    N_schedule: Sequence[int],
    tables: ArithTables,
    shift_override: Optional[float] = None,
    resolution_rule: Optional[Callable[[int], int]] = None,
    reduced: bool = True,
    window: str = "block",
    workers: Optional[int] = None,
) -> dict:
    """Cell counts at each schedule point and the least-squares slope."""
    schedule = [int(N) for N in N_schedule]
    if len(schedule) < 3:
        raise ValidationError(f"box counting needs >= 3 schedule points (got {len(schedule)})")
    if any(b <= a for a, b in zip(schedule, schedule[1:])):
        raise ValidationError("N_schedule must be strictly ascending")
    if window not in ("block", "cumulative"):
        raise ValidationError(f"window must be 'block' or 'cumulative' (got {window!r})")
    if len(schedule) < 4:
        logger.warning("Fewer than 4 schedule points; slope is poorly constrained")
    tables.check(schedule[-1])
    if shift_override is not None:
        profile = profile.with_theta(shift_override)
    profile.f_values(schedule[-1])

    task = partial(
        _box_point,
        profile=profile,
        tables=tables,
        reduced=reduced,
        window=window,
        resolution_rule=resolution_rule,
    )
    points = [p for p in pool_map(task, schedule, workers) if p is not None and p["cells"] > 0]
    if len(points) < 3:
        raise DegenerateInputError(
            f"only {len(points)} schedule points carry arcs; cannot fit a slope",
            {"schedule": schedule},
        )
    x = np.array([p["j"] * math.log(2.0) for p in points])
    y = np.array([math.log(p["cells"]) for p in points])
    if np.ptp(x) == 0:
        raise DegenerateInputError("all schedule points share one resolution; slope undefined")
    slope = float(np.polyfit(x, y, 1)[0])
    logger.info(f"Box-count slope over {len(points)} points: {slope:.4f}")
    return {"slope": slope, "points": points, "window": window, "reduced": reduced}


def box_count_estimate(
    profile: ApproxProfile,
    N_schedule: Sequence[int],
    tables: ArithTables,
    shift_override: Optional[float] = None,
    resolution_rule: Optional[Callable[[int], int]] = None,
    reduced: bool = True,
    window: str = "block",
    workers: Optional[int] = None,
) -> float:
    """Box-counting dimension estimate of the arc union over the schedule."""
    return box_count_table(
        profile, N_schedule, tables, shift_override, resolution_rule, reduced, window, workers
    )["slope"]
