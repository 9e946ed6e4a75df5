"""
Divergence criteria and arithmetic ratio bounds as finite-N traces.

Every criterion here is a limsup statement; a trace only records partial
quotients at checkpoints and labels the trend with a fixed rule. The label
is advisory.
"""

import logging
import math
from dataclasses import asdict, dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

import config
from approx_sets import arcs_for, intersection_measure
from arith_core import (
    ArithTables,
    divisor_summatory,
    safe_log,
    safe_log_array,
    safe_loglog,
    safe_loglog_array,
    safe_logloglog_array,
    square_divisor_counts,
    trial_divisors,
)
from errors import BudgetError, DegenerateInputError, ValidationError
from profiles import ApproxProfile

logger = logging.getLogger(__name__)

DIVERGING_FACTOR = 1.5
BOUNDED_FACTOR = 1.1

DIVERGING = "diverging-trend"
BOUNDED = "bounded-trend"
INCONCLUSIVE = "inconclusive"

KINDS = (
    "second_moment",
    "growth_envelope",
    "hausdorff",
    "full_fraction_moment",
    "full_fraction_positive",
    "log_bounded",
    "duffin_schaeffer",
    "extra_divergence",
    "log_weighted_sum",
    "volume_series",
    "counting_growth",
    "hausdorff_phi",
)


# ---------------------------------------------------------------------------
# Trend rules
# ---------------------------------------------------------------------------

def trend_verdict(quotients: Sequence[float]) -> str:
    """Compare the last-quarter max against the first-quarter max."""
    if len(quotients) < 4:
        return INCONCLUSIVE
    quarter = max(1, len(quotients) // 4)
    q_first = max(quotients[:quarter])
    q_last = max(quotients[-quarter:])
    if q_last > 0 and q_last >= DIVERGING_FACTOR * q_first:
        return DIVERGING
    if q_last <= BOUNDED_FACTOR * q_first:
        return BOUNDED
    return INCONCLUSIVE


def ratio_family_bounded(values: Sequence[float]) -> bool:
    """No blow-up: last-quarter max <= 1.1 x max of the first three quarters."""
    if len(values) < 4:
        raise ValidationError("need at least 4 values to judge a trend")
    quarter = max(1, len(values) // 4)
    head, tail = values[:-quarter], values[-quarter:]
    return max(tail) <= BOUNDED_FACTOR * max(head)


# ---------------------------------------------------------------------------
# Arithmetic ratio families
# ---------------------------------------------------------------------------

def _divisor_count(k: int, tables: ArithTables) -> int:
    if 1 <= k <= tables.limit:
        return int(tables.divisors[k])
    return len(trial_divisors(k))


def ramanujan_ratio(k: int, m: int, tables: ArithTables) -> float:
    """(1 / (d(k) log m)) sum_{n<=m} |c_n(k)| / phi(n)."""
    if k < 1 or m < 2:
        raise ValidationError(f"need k >= 1 and m >= 2 (got k={k}, m={m})")
    tables.check(m)
    ns = np.arange(1, m + 1, dtype=np.int64)
    q = ns // np.gcd(ns, k)
    # |c_n(k)| / phi(n) = |mu(q)| / phi(q) with q = n / (n, k)
    terms = np.abs(tables.mobius[q]).astype(np.float64) / tables.totient[q]
    return math.fsum(terms.tolist()) / (_divisor_count(k, tables) * safe_log(m))


def divisor_square_sum(n: int, tables: ArithTables) -> float:
    """sum_{k<=n} d(k)^2 / k, directly."""
    tables.check(n)
    d = tables.divisors[1 : n + 1].astype(np.float64)
    ks = np.arange(1, n + 1, dtype=np.float64)
    return math.fsum((d * d / ks).tolist())


def divisor_square_sum_via_identity(n: int, tables: ArithTables) -> float:
    """The same sum as sum_{l<=n} d(l^2)/l * H(floor(n/l))."""
    tables.check(n)
    harmonic = np.concatenate([[0.0], np.cumsum(1.0 / np.arange(1, n + 1, dtype=np.float64))])
    squares = square_divisor_counts(n, tables)[1:].astype(np.float64)
    ls = np.arange(1, n + 1, dtype=np.int64)
    return math.fsum((squares / ls * harmonic[n // ls]).tolist())


def divisor_square_ratio(n: int, tables: ArithTables) -> float:
    """(sum_{k<=n} d(k)^2 / k) / log^3 n."""
    if n < 2:
        raise ValidationError(f"n must be >= 2 (got {n})")
    return divisor_square_sum(n, tables) / safe_log(n) ** 3


def gcd_divisor_ratio(m: int, tables: ArithTables) -> float:
    """(sum_{n<=m} d(n) d(m) (n, m)) / (d(m)^3 m log m)."""
    if m < 2:
        raise ValidationError(f"m must be >= 2 (got {m})")
    if m > config.GCD_DIVISOR_BUDGET:
        raise BudgetError(
            f"gcd_divisor at m={m} exceeds budget {config.GCD_DIVISOR_BUDGET}",
            required=m,
            budget=config.GCD_DIVISOR_BUDGET,
        )
    tables.check(m)
    ns = np.arange(1, m + 1, dtype=np.int64)
    d_m = int(tables.divisors[m])
    inner = int((tables.divisors[1 : m + 1] * np.gcd(ns, m)).sum()) * d_m
    return inner / (d_m ** 3 * m * safe_log(m))


def gcd_divisor_ratio_prime(p: int, tables: ArithTables) -> float:
    """gcd_divisor_ratio at a prime: the inner sum collapses to 2 D(p-1) + 4p."""
    tables.check(p)
    if p < 2 or int(tables.smallest_factor[p]) != p:
        raise ValidationError(f"{p} is not prime")
    return (2 * divisor_summatory(p - 1) + 4 * p) / (8 * p * safe_log(p))


def mertens_ratio(m: int, tables: ArithTables) -> float:
    """(1 / log m) prod_{p<=m} (1 + 1/(p - 1)), which tends to e^gamma."""
    if m < 3:
        raise ValidationError(f"m must be >= 3 (got {m})")
    tables.check(m)
    primes = tables.primes[tables.primes <= m]
    product = math.prod(p / (p - 1) for p in primes.tolist())
    return product / math.log(m)


def totient_scan_values(n_lo: int, n_hi: int, tables: ArithTables) -> np.ndarray:
    """phi(n) loglog n / n for n in [n_lo, n_hi]."""
    if n_lo < 10:
        raise ValidationError(f"n_lo must be >= 10 (got {n_lo})")
    if n_hi < n_lo:
        raise ValidationError(f"n_hi must be >= n_lo (got {n_hi} < {n_lo})")
    tables.check(n_hi)
    ns = np.arange(n_lo, n_hi + 1, dtype=np.int64)
    return tables.totient[n_lo : n_hi + 1] * safe_loglog_array(ns) / ns


def totient_liminf_scan(n_lo: int, n_hi: int, tables: ArithTables) -> float:
    """min over [n_lo, n_hi] of phi(n) loglog n / n."""
    values = totient_scan_values(n_lo, n_hi, tables)
    i = int(np.argmin(values))
    logger.debug(f"Totient scan [{n_lo}, {n_hi}]: min {values[i]:.6f} at n={n_lo + i}")
    return float(values[i])


def totient_liminf_witness(n_lo: int, n_hi: int, tables: ArithTables) -> Tuple[int, float]:
    """The minimizing n and its value."""
    values = totient_scan_values(n_lo, n_hi, tables)
    i = int(np.argmin(values))
    return n_lo + i, float(values[i])


# ---------------------------------------------------------------------------
# Full-fraction bounds
# ---------------------------------------------------------------------------

def full_fraction_bound(n: int, m: int, profile: ApproxProfile) -> float:
    """4 f(n) f(m) + 2 (n, m) min{eps_n, eps_m}."""
    f_n, f_m = profile.f(n), profile.f(m)
    return 4.0 * f_n * f_m + 2.0 * math.gcd(n, m) * min(f_n / n, f_m / m)


def full_fraction_bound_check(n: int, m: int, profile: ApproxProfile, tables: ArithTables) -> bool:
    """Exact full-fraction intersection against the bound."""
    for idx in (n, m):
        tables.check(idx)
        profile.require_standard(idx)
    exact = intersection_measure(
        arcs_for(n, profile, False, tables),
        arcs_for(m, profile, False, tables),
    )
    bound = full_fraction_bound(n, m, profile)
    holds = exact <= bound + config.MEASURE_ATOL
    if not holds:
        logger.error(f"Full-fraction bound fails at ({n}, {m}): {exact!r} > {bound!r}")
    return holds


def full_fraction_ratio_bound(N: int, profile: ApproxProfile, tables: ArithTables) -> float:
    """Borel-Cantelli ratio with every intersection replaced by the full-fraction bound."""
    tables.check(N)
    if N * N > config.PAIR_SCAN_BUDGET:
        raise BudgetError(
            f"Pair scan over N={N} needs {N * N} pairs",
            required=N * N,
            budget=config.PAIR_SCAN_BUDGET,
        )
    for n in range(1, N + 1):
        profile.require_standard(n)
    ns = np.arange(1, N + 1, dtype=np.int64)
    f = profile.f_values(N)[1:]
    eps = f / ns
    phi = tables.totient[1 : N + 1]
    rows = [
        math.fsum((np.gcd(ns, n) * np.minimum(eps[n - 1], eps)).tolist())
        for n in range(1, N + 1)
    ]
    denominator = 4.0 * math.fsum(f.tolist()) ** 2 + 2.0 * math.fsum(rows)
    if denominator <= 0:
        raise DegenerateInputError(f"full-fraction ratio undefined at N={N}: f vanishes", {"N": N})
    numerator = math.fsum((2.0 * eps * phi).tolist()) ** 2
    return numerator / denominator


# ---------------------------------------------------------------------------
# Criterion traces
# ---------------------------------------------------------------------------

@dataclass
class CriterionTrace:
    """Partial quotients of one criterion at ascending checkpoints."""
    kind: str
    checkpoints: List[int]
    quotients: List[float]
    verdict_hint: str
    params: Dict[str, object] = field(default_factory=dict)
    zero_guarded: List[int] = field(default_factory=list)
    aux_quotients: Optional[List[float]] = None
    aux_verdict_hint: Optional[str] = None
    bound_checks: Optional[List[bool]] = None

    def header(self) -> dict:
        """JSON header accompanying the CSV rows."""
        data = asdict(self)
        for key in ("checkpoints", "quotients", "aux_quotients", "bound_checks"):
            data.pop(key)
        data["trend_rule"] = {
            "diverging_factor": DIVERGING_FACTOR,
            "bounded_factor": BOUNDED_FACTOR,
            "window": "first quarter vs last quarter of checkpoints",
        }
        return data

    def rows(self) -> List[dict]:
        out = []
        for i, N in enumerate(self.checkpoints):
            row = {"N": N, "quotient": self.quotients[i]}
            if self.aux_quotients is not None:
                row["aux_quotient"] = self.aux_quotients[i]
            if self.bound_checks is not None:
                row["bound_ok"] = self.bound_checks[i]
            out.append(row)
        return out


def log_bounded_satisfiable(a: float, b: float) -> bool:
    """C(a, b) can be met by some f exactly when b < a + 1."""
    return b < a + 1


def divisor_bounded_density(N: int, eps: float, tables: ArithTables) -> float:
    """Fraction of n <= N with d(n) <= log^(1+eps) n."""
    if eps <= 0:
        raise ValidationError(f"eps must be positive (got {eps})")
    tables.check(N)
    ns = np.arange(1, N + 1, dtype=np.int64)
    inside = tables.divisors[1 : N + 1] <= np.power(safe_log_array(ns), 1.0 + eps)
    return float(inside.mean())


def _guarded(num: np.ndarray, den: np.ndarray, checkpoints: List[int], flags: List[int]) -> List[float]:
    out = []
    for N, a, b in zip(checkpoints, num, den):
        if b == 0:
            if a != 0:
                raise DegenerateInputError(f"zero denominator with nonzero numerator at N={N}")
            flags.append(N)
            out.append(0.0)
        else:
            out.append(float(a / b))
    return out


def criterion_trace(
    kind: str,
    profile: ApproxProfile,
    checkpoints: Sequence[int],
    tables: ArithTables,
    h: Optional[Callable[[np.ndarray], np.ndarray]] = None,
    a_b: Optional[Tuple[float, float]] = None,
    phi_weighted: bool = False,
    **params,
) -> CriterionTrace:
    """Partial quotients of a divergence criterion at each checkpoint.

    Extra keyword parameters by kind: log_bounded takes K (default 1); extra_divergence takes c
    (default 1); log_weighted_sum takes A and eps; volume_series takes s.
    """
    if kind not in KINDS:
        raise ValidationError(f"unknown criterion kind {kind!r} (available: {', '.join(KINDS)})")
    checkpoints = [int(N) for N in checkpoints]
    if not checkpoints:
        raise ValidationError("checkpoints must not be empty")
    if checkpoints[0] < 1 or any(b <= a for a, b in zip(checkpoints, checkpoints[1:])):
        raise ValidationError("checkpoints must be strictly ascending positive integers")
    if kind == "hausdorff" and h is None:
        raise ValidationError("kind 'hausdorff' needs a dimension function h")
    if kind != "hausdorff" and kind != "hausdorff_phi" and h is not None:
        raise ValidationError(f"kind {kind!r} takes no dimension function")
    if (kind == "log_bounded") != (a_b is not None):
        raise ValidationError("the pair (a, b) is required for kind 'log_bounded' and only for it")

    N_last = checkpoints[-1]
    tables.check(N_last)
    ns = np.arange(1, N_last + 1, dtype=np.int64)
    nf = ns.astype(np.float64)
    f = profile.f_values(N_last)[1:]
    eps = f / nf
    phi = tables.totient[1 : N_last + 1].astype(np.float64)
    d = tables.divisors[1 : N_last + 1].astype(np.float64)
    logs = safe_log_array(ns)
    at = np.array(checkpoints) - 1
    cap_N = np.array(checkpoints, dtype=np.float64)
    log_N = safe_log_array(cap_N)
    loglog_N = safe_loglog_array(cap_N)

    ds_sum = np.cumsum(phi * f / nf)[at]
    flags: List[int] = []
    trace_params: Dict[str, object] = dict(params)
    aux = None
    bound_checks = None

    if kind == "second_moment":
        den = np.sqrt(np.cumsum(f * d ** 3 * logs ** 2))[at]
        quotients = _guarded(ds_sum, den, checkpoints, flags)
    elif kind == "growth_envelope":
        den = log_N ** 2 * loglog_N * np.exp(3.0 * math.log(2.0) * log_N / loglog_N)
        quotients = _guarded(ds_sum, den, checkpoints, flags)
    elif kind in ("hausdorff", "hausdorff_phi"):
        weighted = phi_weighted or kind == "hausdorff_phi"
        h_fn = h if h is not None else (lambda x: x)
        h_eps = np.asarray(h_fn(eps), dtype=np.float64)
        if (h_eps < 0).any():
            raise ValidationError("dimension function must be nonnegative")
        weights = phi if weighted else nf
        num = np.cumsum(phi * h_eps)[at]
        den = log_N ** 2.5 * np.maximum.accumulate(np.sqrt(h_eps) * weights)[at]
        quotients = _guarded(num, den, checkpoints, flags)
        trace_params["phi_weighted"] = weighted
    elif kind == "full_fraction_moment":
        num = np.cumsum(f)[at]
        den = np.sqrt(np.cumsum(f * d))[at]
        quotients = _guarded(num, den, checkpoints, flags)
    elif kind in ("full_fraction_positive", "duffin_schaeffer"):
        quotients = _guarded(ds_sum, np.cumsum(f)[at], checkpoints, flags)
        if kind == "full_fraction_positive":
            aux = _guarded(ds_sum ** 2, np.cumsum(f * d)[at], checkpoints, flags)
    elif kind == "log_bounded":
        a, b = a_b
        K = float(params.get("K", 1.0))
        trace_params.update({"a": a, "b": b, "K": K})
        if not log_bounded_satisfiable(a, b):
            logger.warning(f"C({a}, {b}) cannot be satisfied by any f (needs b < a + 1)")
        ok = f <= K * np.power(logs, a) / nf * (1.0 + 1e-12)
        bound_checks = [bool(x) for x in np.logical_and.accumulate(ok)[at]]
        quotients = _guarded(ds_sum, np.power(log_N, b), checkpoints, flags)
    elif kind == "extra_divergence":
        c = float(params.get("c", 1.0))
        trace_params["c"] = c
        damping = np.exp(c * safe_loglog_array(ns) * safe_logloglog_array(ns))
        quotients = np.cumsum(phi * f / nf / damping)[at].tolist()
    elif kind == "log_weighted_sum":
        A = float(params.get("A", 4.0))
        e = float(params.get("eps", 0.1))
        trace_params.update({"A": A, "eps": e})
        terms = np.where(ns >= 2, f / np.power(logs, A / 2 + 2.5 + e), 0.0)
        quotients = np.cumsum(terms)[at].tolist()
    elif kind == "volume_series":
        s = float(params.get("s", 1.0))
        if not 0 < s <= 1:
            raise ValidationError(f"s must lie in (0, 1] (got {s})")
        trace_params["s"] = s
        quotients = np.cumsum(np.power(eps, s) * phi)[at].tolist()
    else:  # counting_growth
        expected = np.cumsum(2.0 * eps * phi)[at]
        den = np.exp(log_N * safe_logloglog_array(cap_N) / loglog_N)
        quotients = _guarded(expected, den, checkpoints, flags)

    quotients = [float(q) for q in quotients]
    if flags:
        logger.warning(f"{kind}: 0/0 reported as 0 at {len(flags)} checkpoint(s)")
    trace = CriterionTrace(
        kind=kind,
        checkpoints=checkpoints,
        quotients=quotients,
        verdict_hint=trend_verdict(quotients),
        params=trace_params,
        zero_guarded=sorted(set(flags)),
        aux_quotients=[float(q) for q in aux] if aux is not None else None,
        aux_verdict_hint=trend_verdict(aux) if aux is not None else None,
        bound_checks=bound_checks,
    )
    logger.info(f"Criterion {kind}: {len(checkpoints)} checkpoints, {trace.verdict_hint}")
    return trace
