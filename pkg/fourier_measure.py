"""
Fourier route to the measure of A_n and of pairwise intersections.

The indicator g_n of A_n has coefficients

    g_n^(0) = 2 eps_n phi(n)
    g_n^(k) = sin(2 pi eps_n k) c_n(k) e^(2 pi i theta(n) k / n) / (pi k)

and Parseval turns lambda(A_n ∩ A_m) into a series in c_n(k) c_m(k) / k^2.
The series is evaluated either by direct truncation with a uniform tail
bound, or in closed form through sum_k cos(2 pi k x)/k^2 = pi^2 B_2({x}).
"""

import logging
import math
from dataclasses import dataclass, field
from functools import partial
from typing import Dict, List, Optional, Sequence

import numpy as np

import config
from approx_sets import arcs_for, intersection_measure, measure
from arith_core import ArithTables, ramanujan_row, safe_log_array
from errors import BudgetError, DegenerateInputError, ValidationError
from profiles import ApproxProfile
from workers import chunk_ranges, pool_map, resolve_workers

logger = logging.getLogger(__name__)

CHUNK = 1 << 20
TWO_OVER_PI2 = 2.0 / math.pi ** 2
BC_MODES = ("exact", "series", "closed")


@dataclass
class SeriesResult:
    """Truncated intersection series with its rigorous tail bound."""
    value: float
    truncation_M: int
    tail_bound: float
    even_sum: Optional[float] = None
    odd_sum: Optional[float] = None
    diagnostics: Dict[str, float] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "truncation_M": self.truncation_M,
            "tail_bound": self.tail_bound,
            "even_sum": self.even_sum,
            "odd_sum": self.odd_sum,
            **self.diagnostics,
        }


def coefficient_row(n: int, ks: np.ndarray, profile: ApproxProfile, tables: ArithTables) -> np.ndarray:
    """g_n^(k) for an array of k."""
    tables.check(n)
    ks = np.asarray(ks, dtype=np.int64)
    eps = profile.f(n) / n
    theta = profile.theta(n)
    out = np.empty(ks.shape, dtype=np.complex128)
    zero = ks == 0
    out[zero] = 2.0 * eps * int(tables.totient[n])
    k = ks[~zero]
    kf = k.astype(np.float64)
    sines = np.sin(2.0 * np.pi * np.mod(eps * kf, 1.0))
    phase = np.exp(2j * np.pi * np.mod(theta * kf / n, 1.0))
    out[~zero] = sines * ramanujan_row(n, k, tables) * phase / (np.pi * kf)
    return out


def coefficient(n: int, k: int, profile: ApproxProfile, tables: ArithTables) -> complex:
    """g_n^(k)."""
    return complex(coefficient_row(n, np.array([k]), profile, tables)[0])


def series_truncation(n: int, m: int, tol: float, tables: ArithTables) -> int:
    """Least M with (2/pi^2) phi(n) phi(m) / M <= tol."""
    if tol <= 0:
        raise ValidationError(f"tol must be positive (got {tol})")
    phi_prod = int(tables.totient[n]) * int(tables.totient[m])
    return max(1, math.ceil(TWO_OVER_PI2 * phi_prod / tol))


def analytic_truncation(n: int, m: int, tables: ArithTables) -> int:
    """The analytic truncation d(n) d(m) (n, m) n^4 m^4 (diagnostic only)."""
    tables.check(n)
    tables.check(m)
    return int(tables.divisors[n]) * int(tables.divisors[m]) * math.gcd(n, m) * n ** 4 * m ** 4


def _direct_series(
    n: int,
    m: int,
    profile: ApproxProfile,
    tol: float,
    tables: ArithTables,
    absolute: bool,
) -> SeriesResult:
    for idx in (n, m):
        tables.check(idx)
        profile.require_standard(idx)
    M = series_truncation(n, m, tol, tables)
    if M > config.SERIES_TERM_BUDGET:
        raise BudgetError(
            f"Series for ({n}, {m}) at tol={tol} needs M={M} terms "
            f"(budget {config.SERIES_TERM_BUDGET})",
            required=M,
            budget=config.SERIES_TERM_BUDGET,
        )

    eps_n, eps_m = profile.f(n) / n, profile.f(m) / m
    delta = profile.theta(n) / n - profile.theta(m) / m
    phi_n, phi_m = int(tables.totient[n]), int(tables.totient[m])

    even_parts: List[float] = []
    odd_parts: List[float] = []
    for lo in range(1, M + 1, CHUNK):
        k = np.arange(lo, min(lo + CHUNK, M + 1), dtype=np.int64)
        kf = k.astype(np.float64)
        s_n = np.sin(2.0 * np.pi * np.mod(eps_n * kf, 1.0)) * ramanujan_row(n, k, tables)
        s_m = np.sin(2.0 * np.pi * np.mod(eps_m * kf, 1.0)) * ramanujan_row(m, k, tables)
        if absolute:
            terms = np.abs(s_n * s_m) / (kf * kf)
        else:
            terms = s_n * s_m * np.cos(2.0 * np.pi * np.mod(delta * kf, 1.0)) / (kf * kf)
        even = (k & 1) == 0
        even_parts.append(math.fsum(terms[even].tolist()))
        odd_parts.append(math.fsum(terms[~even].tolist()))

    even_sum = math.fsum(even_parts)
    odd_sum = math.fsum(odd_parts)
    head = 4.0 * eps_n * eps_m * phi_n * phi_m
    value = head + TWO_OVER_PI2 * math.fsum([even_sum, odd_sum])
    tail = TWO_OVER_PI2 * phi_n * phi_m / M
    logger.debug(f"Series ({n}, {m}): M={M}, value={value!r}, tail<={tail:.3e}")
    return SeriesResult(
        value=value,
        truncation_M=M,
        tail_bound=tail,
        even_sum=TWO_OVER_PI2 * even_sum,
        odd_sum=TWO_OVER_PI2 * odd_sum,
        diagnostics={"analytic_M": float(analytic_truncation(n, m, tables))},
    )


def intersection_series(
    n: int, m: int, profile: ApproxProfile, tol: float, tables: ArithTables
) -> SeriesResult:
    """lambda(A_n ∩ A_m) from the Fourier series truncated at the uniform-bound M."""
    return _direct_series(n, m, profile, tol, tables, absolute=False)


def absolute_series_bound(
    n: int, m: int, profile: ApproxProfile, tol: float, tables: ArithTables
) -> SeriesResult:
    """Same series with absolute terms and the cosine dropped: an upper bound."""
    return _direct_series(n, m, profile, tol, tables, absolute=True)


def parseval_sum(n: int, profile: ApproxProfile, tol: float, tables: ArithTables) -> SeriesResult:
    """sum_k |g_n^(k)|^2 over |k| <= M, which should reproduce measure(A_n)."""
    profile.require_standard(n)
    M = series_truncation(n, n, tol, tables)
    if M > config.SERIES_TERM_BUDGET:
        raise BudgetError(
            f"Parseval sum for n={n} at tol={tol} needs M={M} terms",
            required=M,
            budget=config.SERIES_TERM_BUDGET,
        )
    parts = [abs(coefficient(n, 0, profile, tables)) ** 2]
    for lo in range(1, M + 1, CHUNK):
        k = np.arange(lo, min(lo + CHUNK, M + 1), dtype=np.int64)
        parts.append(2.0 * math.fsum((np.abs(coefficient_row(n, k, profile, tables)) ** 2).tolist()))
    phi = int(tables.totient[n])
    return SeriesResult(
        value=math.fsum(parts),
        truncation_M=M,
        tail_bound=TWO_OVER_PI2 * phi * phi / M,
    )


def _bernoulli2(x: np.ndarray) -> np.ndarray:
    t = np.mod(x, 1.0)
    return t * t - t + 1.0 / 6.0


def series_closed_form(n: int, m: int, profile: ApproxProfile, tables: ArithTables) -> float:
    """The full intersection series summed exactly.

    c_n(k) c_m(k) and the sine/cosine factors expand into cosines of
    frequencies a/n ± b/m ± u ± delta, and every resulting sum over k
    is pi^2 B_2 of the fractional frequency. Cost is O(phi(n) phi(m)).
    """
    for idx in (n, m):
        tables.check(idx)
        profile.require_standard(idx)
    phi_n, phi_m = int(tables.totient[n]), int(tables.totient[m])
    if phi_n * phi_m > config.SERIES_TERM_BUDGET:
        raise BudgetError(
            f"Closed-form series for ({n}, {m}) needs {phi_n * phi_m} residue pairs",
            required=phi_n * phi_m,
            budget=config.SERIES_TERM_BUDGET,
        )
    eps_n, eps_m = profile.f(n) / n, profile.f(m) / m
    head = 4.0 * eps_n * eps_m * phi_n * phi_m
    if eps_n == 0 or eps_m == 0:
        return head
    delta = profile.theta(n) / n - profile.theta(m) / m
    u, v = eps_n - eps_m, eps_n + eps_m

    a = np.arange(1, n + 1, dtype=np.int64)
    a = a[np.gcd(a, n) == 1]
    b = np.arange(1, m + 1, dtype=np.int64)
    b = b[np.gcd(b, m) == 1]
    nm = n * m
    am = (a * m)[:, None]
    bn = (b * n)[None, :]
    bases = [((am + bn) % nm).ravel() / nm, ((am - bn) % nm).ravel() / nm]

    parts = []
    for base in bases:
        for s_delta in (delta, -delta):
            for s in (1.0, -1.0):
                parts.append(math.fsum(_bernoulli2(base + s * u + s_delta).tolist()))
                parts.append(-math.fsum(_bernoulli2(base + s * v + s_delta).tolist()))
    return head + math.fsum(parts) / 8.0


def divisor_moment_sum(N: int, profile: ApproxProfile, tables: ArithTables) -> float:
    """sum_{n<=N} eps_n n d^3(n) log^2 n, with log 1 := 2."""
    tables.check(N)
    f = profile.f_values(N)[1:]
    ns = np.arange(1, N + 1, dtype=np.int64)
    d = tables.divisors[1 : N + 1].astype(np.float64)
    logs = safe_log_array(ns)
    return math.fsum((f * d ** 3 * logs ** 2).tolist())


def second_moment_bound(N: int, profile: ApproxProfile, tables: ArithTables) -> float:
    """Constant-free dominant sum of the second-moment estimate."""
    return divisor_moment_sum(N, profile, tables)


@dataclass
class _PairScan:
    mode: str
    profile: ApproxProfile
    tables: ArithTables
    tol: float
    arcs: Optional[list] = None

    def value(self, n: int, m: int) -> float:
        if self.mode == "exact":
            return intersection_measure(self.arcs[n - 1], self.arcs[m - 1])
        if self.mode == "series":
            return intersection_series(n, m, self.profile, self.tol, self.tables).value
        return series_closed_form(n, m, self.profile, self.tables)


def _pair_rows(rows: range, scan: _PairScan) -> List[float]:
    """For each n in rows: lambda(n, n) + 2 sum_{m<n} lambda(n, m)."""
    out = []
    for n in rows:
        off_diagonal = math.fsum(scan.value(n, m) for m in range(1, n))
        out.append(scan.value(n, n) + 2.0 * off_diagonal)
    return out


def borel_cantelli_ratio(
    N: int,
    profile: ApproxProfile,
    reduced: bool,
    tables: ArithTables,
    mode: str = "exact",
    tol: Optional[float] = None,
    workers: Optional[int] = None,
) -> float:
    """(sum lambda(A_n))^2 / sum_{n,m} lambda(A_n ∩ A_m) over n, m <= N."""
    if mode not in BC_MODES:
        raise ValidationError(f"mode must be one of {BC_MODES} (got {mode!r})")
    if mode != "exact" and not reduced:
        raise ValidationError("series modes describe reduced fractions only")
    tables.check(N)
    if N * N > config.PAIR_SCAN_BUDGET:
        raise BudgetError(
            f"Pair scan over N={N} needs {N * N} pairs (budget {config.PAIR_SCAN_BUDGET})",
            required=N * N,
            budget=config.PAIR_SCAN_BUDGET,
        )
    for n in range(1, N + 1):
        profile.require_standard(n)

    tol = config.BC_SERIES_TOL if tol is None else tol
    scan = _PairScan(mode=mode, profile=profile, tables=tables, tol=tol)

    if mode == "exact":
        scan.arcs = [arcs_for(n, profile, reduced, tables) for n in range(1, N + 1)]
        numerator_terms = [measure(a) for a in scan.arcs]
    else:
        f = profile.f_values(N)
        numerator_terms = [2.0 * f[n] / n * int(tables.totient[n]) for n in range(1, N + 1)]
        if mode == "series":
            required = sum(
                series_truncation(n, m, tol, tables) for n in range(1, N + 1) for m in range(1, n + 1)
            )
            if required > config.SERIES_TERM_BUDGET:
                raise BudgetError(
                    f"Series mode over N={N} at tol={tol} needs {required} terms",
                    required=required,
                    budget=config.SERIES_TERM_BUDGET,
                )

    n_workers = resolve_workers(workers)
    chunks = chunk_ranges(1, N, n_workers * 4)
    row_sums = pool_map(partial(_pair_rows, scan=scan), chunks, n_workers)
    denominator = math.fsum(v for chunk in row_sums for v in chunk)
    numerator = math.fsum(numerator_terms) ** 2

    if denominator <= 0:
        raise DegenerateInputError(
            f"Borel-Cantelli ratio undefined at N={N}: every A_n is empty",
            {"N": N},
        )
    ratio = numerator / denominator
    logger.info(f"Borel-Cantelli ratio ({mode}) at N={N}: {ratio:.6f}")
    return ratio
