"""
Exact arithmetic-function layer.

Sieved tables of the Euler totient, divisor count and Moebius function, the
Ramanujan sum in closed form (with its defining exponential sum kept as an
oracle), the full trigonometric sum, and the divisor identities the
intersection estimates rest on.
"""

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Tuple

import numpy as np

import config
from errors import CapacityError, ConsistencyError, ValidationError

logger = logging.getLogger(__name__)

INT64_MAX = 2**63 - 1


def safe_log(x: float) -> float:
    """Natural log with log 0 = log 1 := 2, so that log log stays defined."""
    if x <= 1:
        return 2.0
    return math.log(x)


def safe_loglog(x: float) -> float:
    """log log x, with an inner log at or below 1 re-defined to 2 (so x <= e)."""
    inner = safe_log(x)
    return math.log(inner if inner > 1 else 2.0)


def safe_logloglog(x: float) -> float:
    """Three-fold log with the same guard at every level."""
    inner = safe_loglog(x)
    return math.log(inner if inner > 1 else 2.0)


def safe_log_array(n: np.ndarray) -> np.ndarray:
    """Vectorised safe_log over positive integers."""
    n = np.asarray(n, dtype=np.float64)
    out = np.full(n.shape, 2.0)
    mask = n > 1
    out[mask] = np.log(n[mask])
    return out


def safe_loglog_array(n: np.ndarray) -> np.ndarray:
    """Vectorised safe_loglog."""
    inner = safe_log_array(n)
    return np.log(np.where(inner > 1, inner, 2.0))


def safe_logloglog_array(n: np.ndarray) -> np.ndarray:
    """Vectorised safe_logloglog."""
    inner = safe_loglog_array(n)
    return np.log(np.where(inner > 1, inner, 2.0))


@dataclass(frozen=True)
class ArithTables:
    """Sieved arithmetic tables up to `limit`.

    Arrays have length limit + 1 and are indexed directly by n; index 0 holds 0.
    All arrays are read-only after construction.
    """
    limit: int
    totient: np.ndarray  # int64
    divisors: np.ndarray  # int64, d(n)
    mobius: np.ndarray  # int8
    smallest_factor: np.ndarray  # int64
    primes: np.ndarray = field(repr=False)  # int64

    def check(self, n: int, what: str = "n"):
        """Reject indices outside the table."""
        if n < 1:
            raise ValidationError(f"{what} must be >= 1 (got {n})", {"value": n})
        if n > self.limit:
            raise CapacityError(
                f"{what}={n} exceeds table limit {self.limit}",
                {"value": n, "limit": self.limit},
            )

    def factorize(self, n: int) -> List[Tuple[int, int]]:
        """Prime factorisation [(p, e), ...] via the smallest-factor table."""
        self.check(n)
        factors = []
        while n > 1:
            p = int(self.smallest_factor[n])
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            factors.append((p, e))
        return factors

    def divisors_of(self, n: int) -> List[int]:
        """Sorted positive divisors of n."""
        divs = [1]
        for p, e in self.factorize(n):
            divs = [d * p**k for d in divs for k in range(e + 1)]
        return sorted(divs)


def build_tables(limit: int) -> ArithTables:
    """Linear sieve filling totient, divisor count and Moebius in one pass."""
    if limit < 1 or limit > config.SIEVE_CEILING:
        raise CapacityError(
            f"Table limit must be in [1, {config.SIEVE_CEILING}] (got {limit})",
            {"limit": limit, "ceiling": config.SIEVE_CEILING},
        )

    spf = [0] * (limit + 1)
    phi = [0] * (limit + 1)
    mu = [0] * (limit + 1)
    d = [0] * (limit + 1)
    exp_spf = [0] * (limit + 1)  # exponent of the smallest prime factor
    primes: List[int] = []

    phi[1] = mu[1] = d[1] = 1
    spf[1] = 1

    for i in range(2, limit + 1):
        if spf[i] == 0:
            spf[i] = i
            primes.append(i)
            phi[i] = i - 1
            mu[i] = -1
            d[i] = 2
            exp_spf[i] = 1
        spf_i = spf[i]
        for p in primes:
            ip = i * p
            if p > spf_i or ip > limit:
                break
            spf[ip] = p
            if p == spf_i:
                phi[ip] = phi[i] * p
                mu[ip] = 0
                exp_spf[ip] = exp_spf[i] + 1
                d[ip] = d[i] // (exp_spf[i] + 1) * (exp_spf[i] + 2)
            else:
                phi[ip] = phi[i] * (p - 1)
                mu[ip] = -mu[i]
                exp_spf[ip] = 1
                d[ip] = d[i] * 2

    arrays = {
        "totient": np.array(phi, dtype=np.int64),
        "divisors": np.array(d, dtype=np.int64),
        "mobius": np.array(mu, dtype=np.int8),
        "smallest_factor": np.array(spf, dtype=np.int64),
        "primes": np.array(primes, dtype=np.int64),
    }
    for arr in arrays.values():
        arr.setflags(write=False)

    logger.info(f"Built arithmetic tables up to {limit} ({len(primes)} primes)")
    return ArithTables(limit=limit, **arrays)


def ramanujan(n: int, k: int, tables: ArithTables) -> int:
    """c_n(k) = mu(n/(n,k)) * phi(n) / phi(n/(n,k)), exactly."""
    tables.check(n)
    q = n // math.gcd(n, abs(k))
    mu_q = int(tables.mobius[q])
    if mu_q == 0:
        return 0
    return mu_q * (int(tables.totient[n]) // int(tables.totient[q]))


def ramanujan_row(n: int, ks: np.ndarray, tables: ArithTables) -> np.ndarray:
    """c_n(k) for an array of k, vectorised."""
    tables.check(n)
    ks = np.abs(np.asarray(ks, dtype=np.int64))
    q = n // np.gcd(ks, n)
    return tables.mobius[q].astype(np.int64) * (int(tables.totient[n]) // tables.totient[q])


def ramanujan_direct(n: int, k: int) -> int:
    """Evaluate the defining exponential sum over reduced residues (oracle only)."""
    if n < 1:
        raise ValidationError(f"n must be >= 1 (got {n})")
    a = np.arange(1, n + 1, dtype=np.int64)
    a = a[np.gcd(a, n) == 1]
    phases = 2.0 * np.pi * ((a * (k % n)) % n) / n
    total = np.exp(1j * phases).sum()
    nearest = int(round(total.real))
    tol = 1e-6 * n
    if abs(total.imag) >= tol or abs(total.real - nearest) >= tol:
        raise ConsistencyError(
            f"Exponential sum for c_{n}({k}) is not near an integer: {total}",
            {"n": n, "k": k, "real": total.real, "imag": total.imag},
        )
    return nearest


def full_trig_sum(n: int, k: int) -> int:
    """Delta_n(k): n when n divides k, else 0."""
    if n < 1:
        raise ValidationError(f"n must be >= 1 (got {n})")
    return n if k % n == 0 else 0


def dtilde(n: int, tables: ArithTables) -> Fraction:
    """sum over s | n of phi(s)/s, as an exact fraction."""
    total = sum(
        (Fraction(int(tables.totient[s]), s) for s in tables.divisors_of(n)),
        Fraction(0),
    )
    if total.numerator > INT64_MAX or total.denominator > INT64_MAX:
        raise CapacityError(
            f"dtilde({n}) does not fit in 64-bit numerator/denominator",
            {"n": n},
        )
    return total


def gcd_sum(n: int) -> int:
    """sum_{1<=m<=n} gcd(n, m), by direct summation."""
    if n < 1:
        raise ValidationError(f"n must be >= 1 (got {n})")
    m = np.arange(1, n + 1, dtype=np.int64)
    return int(np.gcd(m, n).sum())


def trial_divisors(k: int) -> List[int]:
    """Divisors of k by trial division up to sqrt(k)."""
    if k < 1:
        raise ValidationError(f"k must be >= 1 (got {k})")
    r = np.arange(1, math.isqrt(k) + 1, dtype=np.int64)
    small = r[k % r == 0]
    large = k // small[::-1]
    if small[-1] * small[-1] == k:
        large = large[1:]
    return [int(x) for x in np.concatenate([small, large])]


def _divisor_count_of_square(l: int, tables: Optional[ArithTables]) -> int:
    """d(l^2) = prod (2e + 1) over the factorisation of l."""
    if tables is not None and l <= tables.limit:
        factors = tables.factorize(l)
    else:
        factors = []
        m, p = l, 2
        while p * p <= m:
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            if e:
                factors.append((p, e))
            p += 1
        if m > 1:
            factors.append((m, 1))
    result = 1
    for _, e in factors:
        result *= 2 * e + 1
    return result


def square_divisor_counts(limit: int, tables: ArithTables) -> np.ndarray:
    """d(l^2) for l = 0..limit (index 0 holds 0), from the smallest-factor table."""
    tables.check(limit)
    spf = tables.smallest_factor
    out = [0] * (limit + 1)
    out[1] = 1
    for l in range(2, limit + 1):
        p = int(spf[l])
        rest, e = l, 0
        while rest % p == 0:
            rest //= p
            e += 1
        out[l] = (2 * e + 1) * out[rest]
    return np.array(out, dtype=np.int64)


def divisor_summatory(x: int) -> int:
    """D(x) = sum_{n<=x} d(n) by the hyperbola method."""
    if x < 1:
        return 0
    r = math.isqrt(x)
    return 2 * sum(x // i for i in range(1, r + 1)) - r * r


def divisor_square_identity(k: int, tables: Optional[ArithTables] = None) -> bool:
    """Check d(k)^2 == sum_{l | k} d(l^2) along two independent routes."""
    divs = trial_divisors(k)
    lhs = len(divs) ** 2
    rhs = sum(_divisor_count_of_square(l, tables) for l in divs)
    if lhs != rhs:
        logger.error(f"Divisor-square identity fails at k={k}: {lhs} != {rhs}")
    return lhs == rhs


def gcd_sum_identity(n: int, tables: ArithTables) -> bool:
    """Check sum_m gcd(n, m) == n * dtilde(n)."""
    direct = gcd_sum(n)
    via = n * dtilde(n, tables)
    if direct != via:
        logger.error(f"gcd-sum identity fails at n={n}: {direct} != {via}")
    return direct == via


def trig_sum_identity(n: int, k: int, tables: ArithTables) -> bool:
    """Check sum_{s | n} c_s(k) == Delta_n(k)."""
    lhs = sum(ramanujan(s, k, tables) for s in tables.divisors_of(n))
    rhs = full_trig_sum(n, k)
    if lhs != rhs:
        logger.error(f"Divisor sum of c_s({k}) over s | {n} is {lhs}, expected {rhs}")
    return lhs == rhs
