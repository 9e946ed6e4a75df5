"""
Oracle batteries behind `verify`.

Each check cross-examines one computation against an independent route
(definitional sums, exact sweeps, hand-derivable constants) and raises
ConsistencyError on disagreement. The runner logs every check and keeps
going after a failure so the report is complete.
"""

import logging
import math
import time
from dataclasses import asdict, dataclass
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

import config
from approx_sets import arcs_for, intersection_measure, measure
from arith_core import (
    ArithTables,
    build_tables,
    divisor_square_identity,
    gcd_sum_identity,
    ramanujan_direct,
    ramanujan_row,
    trig_sum_identity,
)
from counting import expected_count, sample_counts, summarize_counts
from criteria import (
    criterion_trace,
    ramanujan_ratio,
    divisor_square_ratio,
    divisor_square_sum,
    divisor_square_sum_via_identity,
    gcd_divisor_ratio,
    gcd_divisor_ratio_prime,
    full_fraction_bound_check,
    mertens_ratio,
    ratio_family_bounded,
    totient_liminf_scan,
)
from dimension import box_count_estimate, default_alpha_grid, dyadic_schedule, counting_dimension
from errors import ConsistencyError, ValidationError
from fourier_measure import intersection_series, series_closed_form
from profiles import make_profile
from results_writer import format_cell

logger = logging.getLogger(__name__)

EULER_GAMMA = 0.5772156649015329

# Problem sizes per scale; "full" matches the acceptance targets
SCALES: Dict[str, Dict[str, int]] = {
    "quick": {
        "table_limit": 1 << 16,
        "ramanujan_n": 60,
        "ramanujan_k": 120,
        "square_identity_k": 2_000,
        "gcd_sum_n": 2_000,
        "series_tuples": 40,
        "series_max_n": 60,
        "measure_n": 500,
        "count_N": 10_000,
        "count_samples": 50,
        "dimension_exp": 14,
        "box_exp": 9,
        "ramanujan_ratio_k": 30,
        "ramanujan_ratio_m_exp": 10,
        "divisor_square_exp": 14,
        "gcd_divisor_m": 500,
        "full_fraction_tuples": 100,
        "full_fraction_grid": 60,
        "criteria_exp": 16,
    },
    "full": {
        "table_limit": 1_000_000,
        "ramanujan_n": 200,
        "ramanujan_k": 400,
        "square_identity_k": 100_000,
        "gcd_sum_n": 20_000,
        "series_tuples": 500,
        "series_max_n": 200,
        "measure_n": 10_000,
        "count_N": 100_000,
        "count_samples": 200,
        "dimension_exp": 20,
        "box_exp": 10,
        "ramanujan_ratio_k": 100,
        "ramanujan_ratio_m_exp": 13,
        "divisor_square_exp": 19,
        "gcd_divisor_m": 10_000,
        "full_fraction_tuples": 1_000,
        "full_fraction_grid": 300,
        "criteria_exp": 19,
    },
}


@dataclass
class CheckResult:
    """Outcome of one oracle check."""
    name: str
    passed: bool
    cases: int
    detail: str
    seconds: float = 0.0

    def to_dict(self) -> dict:
        return asdict(self)


def _fail(message: str, **details):
    raise ConsistencyError(message, details)


def random_table_profile(rng: np.random.Generator, ns: Sequence[int]):
    """Table profile with uniform f in [0, 1/2] and theta in [0, 1/2] at each n."""
    values = {int(n): (float(rng.uniform(0.0, 0.5)), float(rng.uniform(0.0, 0.5))) for n in ns}
    return make_profile("table", {"values": values, "f_range": "standard"})


class OracleBattery:
    """Runs the oracle checks at a chosen scale."""

    def __init__(self, scale: str = "quick", seed: Optional[int] = None, workers: Optional[int] = None):
        if scale not in SCALES:
            raise ValidationError(f"unknown scale {scale!r} (available: {', '.join(SCALES)})")
        self.scale = scale
        self.size = SCALES[scale]
        self.seed = config.DEFAULT_SEED if seed is None else seed
        self.workers = workers
        self._tables: Optional[ArithTables] = None

    @property
    def tables(self) -> ArithTables:
        if self._tables is None:
            self._tables = build_tables(self.size["table_limit"])
        return self._tables

    def rng(self, stream: int) -> np.random.Generator:
        return np.random.Generator(np.random.Philox(np.random.SeedSequence([self.seed, stream])))

    def checks(self) -> List[Tuple[str, Callable[[], Tuple[int, str]]]]:
        return [
            ("ramanujan_closed_form", self.check_ramanujan),
            ("divisor_square_identity", self.check_square_identity),
            ("divisor_sum_identities", self.check_divisor_sums),
            ("series_vs_sweep", self.check_series),
            ("measure_formula", self.check_measure),
            ("counting_shadow", self.check_counting),
            ("dimension", self.check_dimension),
            ("bound_suites", self.check_bounds),
            ("full_fraction_bound", self.check_full_fraction),
            ("criterion_traces", self.check_criteria),
            ("determinism", self.check_determinism),
        ]

    def _run_with_logging(self, name: str, func: Callable[[], Tuple[int, str]]) -> CheckResult:
        """Run one check, turning any failure into a failed result."""
        logger.info(f"Starting: {name}")
        started = time.perf_counter()
        try:
            cases, detail = func()
            passed = True
            logger.info(f"Completed: {name} ({cases} cases)")
        except Exception as e:
            cases, detail, passed = 0, str(e), False
            logger.error(f"Failed: {name} - {e}")
        return CheckResult(name, passed, cases, detail, time.perf_counter() - started)

    def run(self, only: Optional[Sequence[str]] = None) -> List[CheckResult]:
        known = [name for name, _ in self.checks()]
        unknown = sorted(set(only or ()) - set(known))
        if unknown:
            raise ValidationError(f"unknown checks {unknown} (available: {', '.join(known)})")
        selected = [(n, f) for n, f in self.checks() if only is None or n in only]
        return [self._run_with_logging(name, func) for name, func in selected]

    # ------------------------------------------------------------------
    # Checks
    # ------------------------------------------------------------------

    def check_ramanujan(self) -> Tuple[int, str]:
        ks = np.arange(0, self.size["ramanujan_k"] + 1, dtype=np.int64)
        cases = 0
        for n in range(1, self.size["ramanujan_n"] + 1):
            closed = ramanujan_row(n, ks, self.tables)
            for k, value in zip(ks.tolist(), closed.tolist()):
                direct = ramanujan_direct(n, k)
                if direct != value:
                    _fail(f"c_{n}({k}): closed form {value} != exponential sum {direct}", n=n, k=k)
                cases += 1
        return cases, "closed form equals the exponential sum"

    def check_square_identity(self) -> Tuple[int, str]:
        top = self.size["square_identity_k"]
        for k in range(1, top + 1):
            if not divisor_square_identity(k, self.tables):
                _fail(f"d(k)^2 != sum_(l|k) d(l^2) at k={k}", k=k)
        return top, f"identity exact for k <= {top}"

    def check_divisor_sums(self) -> Tuple[int, str]:
        top = self.size["gcd_sum_n"]
        for n in range(1, top + 1):
            if not gcd_sum_identity(n, self.tables):
                _fail(f"gcd sum at n={n} differs from n * dtilde(n)", n=n)
        cases = top
        for n in range(1, self.size["ramanujan_n"] + 1):
            for k in range(0, 2 * n + 1):
                if not trig_sum_identity(n, k, self.tables):
                    _fail(f"sum of c_s({k}) over s | {n} differs from Delta_{n}({k})", n=n, k=k)
                cases += 1
        return cases, f"gcd sums exact for n <= {top}; divisor sums of c_s(k) give Delta_n(k)"

    def check_series(self) -> Tuple[int, str]:
        rng = self.rng(3)
        top = self.size["series_max_n"]
        worst = 0.0
        count = self.size["series_tuples"]
        for _ in range(count):
            n, m = (int(v) for v in rng.integers(1, top + 1, size=2))
            profile = random_table_profile(rng, {n, m})
            exact = intersection_measure(
                arcs_for(n, profile, True, self.tables), arcs_for(m, profile, True, self.tables)
            )
            closed = series_closed_form(n, m, profile, self.tables)
            error = abs(closed - exact)
            worst = max(worst, error)
            if error > 1e-6:
                _fail(f"closed-form series at ({n}, {m}) off by {error:.3e}", n=n, m=m)
        # the truncated series on small pairs, against its own tail bound
        small = 0
        for n in range(1, 9):
            for m in range(1, n + 1):
                profile = random_table_profile(rng, {n, m})
                exact = intersection_measure(
                    arcs_for(n, profile, True, self.tables), arcs_for(m, profile, True, self.tables)
                )
                result = intersection_series(n, m, profile, 1e-4, self.tables)
                if abs(result.value - exact) > result.tail_bound + 1e-9:
                    _fail(
                        f"truncated series at ({n}, {m}) misses the sweep by more than its tail bound",
                        n=n, m=m, series=result.value, exact=exact, tail=result.tail_bound,
                    )
                small += 1
        return count + small, f"max closed-form deviation {worst:.3e}"

    def check_measure(self) -> Tuple[int, str]:
        top = self.size["measure_n"]
        profile = random_table_profile(self.rng(4), range(1, top + 1))
        for n in range(1, top + 1):
            got = measure(arcs_for(n, profile, True, self.tables))
            want = 2.0 * profile.f(n) / n * int(self.tables.totient[n])
            if abs(got - want) > 1e-12:
                _fail(f"measure(A_{n}) = {got!r}, expected {want!r}", n=n)
        return top, "measure matches 2 (f(n)/n) phi(n)"

    def check_counting(self) -> Tuple[int, str]:
        N = self.size["count_N"]
        band = 0.03 if self.scale == "full" else 0.1
        target = 6.0 / math.pi ** 2 * N
        medians = []
        for theta in (0.0, 0.3):
            profile = make_profile("constant", {"value": 0.5, "theta": theta})
            E_N = expected_count(N, profile, self.tables)
            if abs(E_N - target) > 0.01 * target:
                _fail(f"E_N = {E_N:.2f} not within 1% of {target:.2f}", N=N)
            reports = sample_counts(N, self.size["count_samples"], self.seed, profile, self.tables, self.workers)
            median = summarize_counts(reports)["median_ratio"]
            if not 1.0 - band <= median <= 1.0 + band:
                _fail(f"median S/E_N = {median:.4f} at theta={theta}", theta=theta)
            medians.append(median)
        return 2 * self.size["count_samples"], f"medians {[round(m, 4) for m in medians]}"

    def check_dimension(self) -> Tuple[int, str]:
        N_max = 1 << self.size["dimension_exp"]
        schedule = dyadic_schedule(5, self.size["box_exp"])
        grid = default_alpha_grid()
        cases = 0
        notes = []
        for tau in (2, 3, 4):
            profile = make_profile("power", {"tau": tau})
            hs = counting_dimension(profile, N_max, grid).counting_dimension
            if abs(hs - 2.0 / tau) > 0.02:
                _fail(f"tau={tau}: counting-formula dimension {hs:.4f} != {2.0 / tau:.4f}", tau=tau)
            box = box_count_estimate(profile, schedule, self.tables, workers=self.workers)
            if abs(box - hs) > 0.1:
                _fail(f"tau={tau}: box count {box:.4f} disagrees with {hs:.4f}", tau=tau)
            notes.append(f"tau={tau}: {hs:.3f}/{box:.3f}")
            cases += 2

        profile = make_profile("power", {"tau": 3})
        variants = [
            box_count_estimate(profile, schedule, self.tables, shift_override=theta, workers=self.workers)
            for theta in (0.0, 0.1, 0.3, 0.5)
        ]
        variants.append(box_count_estimate(profile, schedule, self.tables, reduced=False, workers=self.workers))
        spread = max(variants) - min(variants)
        if spread > 0.1:
            _fail(f"box-count estimates across shifts and fraction families spread {spread:.4f}")
        return cases + len(variants), "; ".join(notes) + f"; shift spread {spread:.3f}"

    def check_bounds(self) -> Tuple[int, str]:
        tables = self.tables
        cases = 0

        ms = dyadic_schedule(4, self.size["ramanujan_ratio_m_exp"])
        worst_by_m = []
        for m in ms:
            values = [ramanujan_ratio(k, m, tables) for k in range(1, self.size["ramanujan_ratio_k"] + 1)]
            worst_by_m.append(max(values))
            cases += len(values)
        # sum_{q<=m} mu^2(q)/phi(q) <= log m + 2 bounds every ratio
        if max(worst_by_m) > 1.0 + 2.0 / math.log(ms[0]):
            _fail(f"Ramanujan-sum ratio {max(worst_by_m):.4f} above its analytic ceiling")
        if not ratio_family_bounded(worst_by_m):
            _fail("Ramanujan-sum ratios trend upward", values=worst_by_m)

        divisor_square = [divisor_square_ratio(n, tables) for n in dyadic_schedule(4, self.size["divisor_square_exp"])]
        if not ratio_family_bounded(divisor_square):
            _fail("divisor-square ratios trend upward", values=divisor_square)
        for n in (10, 100, 1000, min(10_000, tables.limit)):
            direct, via = divisor_square_sum(n, tables), divisor_square_sum_via_identity(n, tables)
            if abs(direct - via) > 1e-9 * direct:
                _fail(f"divisor_square sum at n={n}: {direct!r} vs identity route {via!r}", n=n)
        cases += len(divisor_square) + 4

        gcd_divisor = [gcd_divisor_ratio(m, tables) for m in range(2, self.size["gcd_divisor_m"] + 1)]
        if not ratio_family_bounded(gcd_divisor):
            _fail("gcd-divisor ratios trend upward")
        for p in tables.primes[tables.primes <= self.size["gcd_divisor_m"]].tolist():
            generic, closed = gcd_divisor_ratio(p, tables), gcd_divisor_ratio_prime(p, tables)
            if abs(generic - closed) > 1e-12 * generic:
                _fail(f"gcd_divisor at prime {p}: {generic!r} vs {closed!r}", p=p)
        cases += len(gcd_divisor)

        mertens = [mertens_ratio(m, tables) for m in dyadic_schedule(2, tables.limit.bit_length() - 1)]
        if not ratio_family_bounded(mertens):
            _fail("Mertens ratios trend upward", values=mertens)
        at_limit = mertens_ratio(tables.limit, tables)
        if abs(at_limit - math.exp(EULER_GAMMA)) > 0.1 * math.exp(EULER_GAMMA):
            _fail(f"Mertens ratio at {tables.limit} = {at_limit:.5f}, not within 10% of e^gamma")
        cases += len(mertens) + 1

        scan = totient_liminf_scan(10, tables.limit, tables)
        if scan <= 0.25:
            _fail(f"totient scan minimum {scan:.4f} not above 0.25")
        if tables.limit >= 1000:
            upper = totient_liminf_scan(1000, tables.limit, tables)
            if not 0.4 <= upper <= 0.7:
                _fail(f"totient scan minimum from 10^3 is {upper:.4f}, outside [0.4, 0.7]")
        cases += 1
        return cases, f"Mertens {at_limit:.4f}, totient minimum {scan:.4f}"

    def check_full_fraction(self) -> Tuple[int, str]:
        rng = self.rng(8)
        cases = 0
        for _ in range(self.size["full_fraction_tuples"]):
            n, m = (int(v) for v in rng.integers(1, 301, size=2))
            profile = random_table_profile(rng, {n, m})
            if not full_fraction_bound_check(n, m, profile, self.tables):
                _fail(f"full-fraction bound fails at random tuple ({n}, {m})", n=n, m=m)
            cases += 1
        half = make_profile("constant", {"value": 0.5})
        top = self.size["full_fraction_grid"]
        for n in range(1, top + 1):
            for m in range(1, n + 1):
                if not full_fraction_bound_check(n, m, half, self.tables):
                    _fail(f"full-fraction bound fails at ({n}, {m}) with f = 1/2", n=n, m=m)
                cases += 1
        return cases, "zero violations"

    def _trace_checkpoints(self) -> List[int]:
        return dyadic_schedule(4, self.size["criteria_exp"])

    def check_criteria(self) -> Tuple[int, str]:
        checkpoints = self._trace_checkpoints()
        half = make_profile("constant", {"value": 0.5})
        trace = criterion_trace("growth_envelope", half, checkpoints, self.tables)
        if trace.verdict_hint != "diverging-trend":
            _fail(f"growth_envelope trace for f = 1/2 labelled {trace.verdict_hint}")

        quarter = make_profile("constant", {"value": 0.25})
        plain = criterion_trace("second_moment", quarter, checkpoints, self.tables)
        shifted = criterion_trace("second_moment", quarter.with_theta(0.3), checkpoints, self.tables)
        if plain.quotients != shifted.quotients:
            _fail("second_moment quotients change with the shift")

        example = make_profile("factorial-blocks", {"cap": 4})
        log_bounded = criterion_trace("log_bounded", example, checkpoints, self.tables, a_b=(10.0, 7.5))
        if not all(log_bounded.bound_checks):
            first = checkpoints[log_bounded.bound_checks.index(False)]
            _fail(f"factorial-blocks profile breaks f <= log^10 n / n by N={first}")
        return 3 * len(checkpoints), f"growth_envelope {trace.verdict_hint}; log_bounded {log_bounded.verdict_hint}"

    def check_determinism(self) -> Tuple[int, str]:
        def rendered(rows):
            return [[format_cell(v) for v in row.values()] for row in rows]

        profile = make_profile("constant", {"value": 0.5, "theta": 0.3})
        checkpoints = self._trace_checkpoints()[:6]
        first = criterion_trace("second_moment", profile, checkpoints, self.tables).rows()
        second = criterion_trace("second_moment", profile, checkpoints, self.tables).rows()
        if rendered(first) != rendered(second):
            _fail("criterion trace differs between identical runs")

        N = min(2_000, self.tables.limit)
        runs = [
            [r.to_dict() for r in sample_counts(N, 20, self.seed, profile, self.tables, self.workers)]
            for _ in range(2)
        ]
        if rendered(runs[0]) != rendered(runs[1]):
            _fail("sampled counts differ between identical runs")

        power = make_profile("power", {"tau": 3})
        reports = [counting_dimension(power, 1 << 12, default_alpha_grid()).to_dict() for _ in range(2)]
        if reports[0] != reports[1]:
            _fail("dimension report differs between identical runs")
        return 3, "identical outputs on repeat"


def run_battery(
    scale: str = "quick",
    seed: Optional[int] = None,
    workers: Optional[int] = None,
    only: Optional[Sequence[str]] = None,
) -> List[CheckResult]:
    """Run the oracle battery and return one result per check."""
    battery = OracleBattery(scale=scale, seed=seed, workers=workers)
    results = battery.run(only)
    failed = [r.name for r in results if not r.passed]
    if failed:
        logger.error(f"Battery failed checks: {', '.join(failed)}")
    else:
        logger.info(f"Battery passed all {len(results)} checks at scale {scale}")
    return results
