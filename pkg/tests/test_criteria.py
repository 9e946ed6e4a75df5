import math

import numpy as np
import pytest

from criteria import (
    BOUNDED,
    DIVERGING,
    INCONCLUSIVE,
    KINDS,
    log_bounded_satisfiable,
    criterion_trace,
    ramanujan_ratio,
    divisor_square_ratio,
    divisor_square_sum,
    divisor_square_sum_via_identity,
    gcd_divisor_ratio,
    gcd_divisor_ratio_prime,
    full_fraction_bound,
    full_fraction_bound_check,
    full_fraction_ratio_bound,
    mertens_ratio,
    divisor_bounded_density,
    ratio_family_bounded,
    totient_liminf_scan,
    totient_liminf_witness,
    trend_verdict,
)
from dimension import dyadic_schedule
from errors import DegenerateInputError, ValidationError
from fourier_measure import borel_cantelli_ratio
from profiles import make_profile

EULER_GAMMA = 0.5772156649015329


@pytest.mark.parametrize(
    "quotients,expected",
    [
        ([1.0, 1.0, 1.0, 1.0], BOUNDED),
        ([1.0, 1.2, 1.4, 2.0], DIVERGING),
        ([1.0, 1.1, 1.2, 1.3], INCONCLUSIVE),
        ([0.0, 0.0, 0.0, 0.0], BOUNDED),
        ([1.0, 5.0, 9.0], INCONCLUSIVE),
        ([3.0, 2.0, 1.5, 1.0, 0.8, 0.5, 0.4, 0.2], BOUNDED),
    ],
)
def test_trend_verdict(quotients, expected):
    assert trend_verdict(quotients) == expected


def test_ratio_family_bounded():
    assert ratio_family_bounded([1.0, 1.2, 1.1, 1.25])
    assert not ratio_family_bounded([1.0, 1.0, 1.0, 2.0])
    with pytest.raises(ValidationError):
        ratio_family_bounded([1.0, 2.0])


def test_ramanujan_ratio_small(tables):
    assert ramanujan_ratio(1, 2, tables) == pytest.approx(2 / math.log(2))
    # |c_n(6)| / phi(n) for n = 1..6
    direct = 1 / 1 + 1 / 1 + 2 / 2 + 2 / 2 + 1 / 4 + 2 / 2
    assert ramanujan_ratio(6, 6, tables) == pytest.approx(direct / (4 * math.log(6)))
    with pytest.raises(ValidationError):
        ramanujan_ratio(0, 10, tables)


def test_ramanujan_ratio_below_ceiling(tables):
    for m in dyadic_schedule(4, 10):
        worst = max(ramanujan_ratio(k, m, tables) for k in range(1, 31))
        assert worst <= 1 + 2 / math.log(16)


def test_divisor_square(tables):
    assert divisor_square_ratio(2, tables) == pytest.approx(3 / math.log(2) ** 3)
    d = [1, 2, 2, 3, 2, 4, 2, 4, 3, 4]
    expected = math.fsum(v * v / k for k, v in enumerate(d, start=1))
    assert divisor_square_ratio(10, tables) == pytest.approx(expected / math.log(10) ** 3)
    for n in (10, 257, 5000):
        assert divisor_square_sum_via_identity(n, tables) == pytest.approx(divisor_square_sum(n, tables), rel=1e-12)
    with pytest.raises(ValidationError):
        divisor_square_ratio(1, tables)


def test_gcd_divisor(tables):
    assert gcd_divisor_ratio(2, tables) == pytest.approx(10 / (16 * math.log(2)))
    for p in (2, 3, 5, 97, 499):
        assert gcd_divisor_ratio_prime(p, tables) == pytest.approx(gcd_divisor_ratio(p, tables), rel=1e-12)
    with pytest.raises(ValidationError):
        gcd_divisor_ratio_prime(10, tables)
    values = [gcd_divisor_ratio(m, tables) for m in range(2, 400)]
    assert ratio_family_bounded(values)


def test_mertens(tables):
    assert mertens_ratio(3, tables) == pytest.approx(3 / math.log(3))
    assert mertens_ratio(100_000, tables) == pytest.approx(math.exp(EULER_GAMMA), rel=0.02)
    with pytest.raises(ValidationError):
        mertens_ratio(2, tables)


def test_totient_scan(tables):
    n, value = totient_liminf_witness(10, 100, tables)
    assert n == 12
    assert value == pytest.approx(4 / 12 * math.log(math.log(12)))
    assert totient_liminf_scan(10, 100, tables) == value
    assert totient_liminf_scan(10, 10, tables) == pytest.approx(0.4 * math.log(math.log(10)))
    assert totient_liminf_scan(1000, 100_000, tables) < math.exp(-EULER_GAMMA) + 0.1
    with pytest.raises(ValidationError):
        totient_liminf_scan(5, 100, tables)
    with pytest.raises(ValidationError):
        totient_liminf_scan(100, 50, tables)


def test_full_fraction_bound(half, tables, rng, random_table_profile):
    assert full_fraction_bound(2, 3, half) == pytest.approx(1 + 1 / 3)
    for _ in range(40):
        n, m = (int(v) for v in rng.integers(1, 80, size=2))
        assert full_fraction_bound_check(n, m, random_table_profile({n, m}), tables)


def test_full_fraction_ratio_below_exact(tables, random_table_profile):
    p = random_table_profile(range(1, 31))
    assert full_fraction_ratio_bound(30, p, tables) <= borel_cantelli_ratio(30, p, True, tables) + 1e-12
    with pytest.raises(DegenerateInputError):
        full_fraction_ratio_bound(10, make_profile("constant", {"value": 0.0}), tables)


def test_log_bounded_satisfiable():
    assert log_bounded_satisfiable(10.0, 7.5)
    assert not log_bounded_satisfiable(1.0, 2.0)


def test_divisor_bounded_density(tables):
    density = divisor_bounded_density(100_000, 0.5, tables)
    assert 0.0 < density <= 1.0
    with pytest.raises(ValidationError):
        divisor_bounded_density(100, 0.0, tables)


def test_zero_profile_trace(tables):
    zero = make_profile("constant", {"value": 0.0})
    checkpoints = dyadic_schedule(4, 10)
    trace = criterion_trace("second_moment", zero, checkpoints, tables)
    assert trace.quotients == [0.0] * len(checkpoints)
    assert trace.zero_guarded == checkpoints
    assert trace.verdict_hint == BOUNDED


def test_growth_envelope_diverges_for_constant(tables, half):
    trace = criterion_trace("growth_envelope", half, dyadic_schedule(4, 17), tables)
    assert trace.verdict_hint == DIVERGING
    assert trace.quotients[-1] > trace.quotients[0]


def test_second_moment_ignores_shift(tables):
    quarter = make_profile("constant", {"value": 0.25})
    checkpoints = dyadic_schedule(4, 12)
    plain = criterion_trace("second_moment", quarter, checkpoints, tables)
    shifted = criterion_trace("second_moment", quarter.with_theta(0.3), checkpoints, tables)
    assert plain.quotients == shifted.quotients


def test_factorial_blocks_meets_log_bounded_bound(tables):
    example = make_profile("factorial-blocks", {"cap": 4})
    trace = criterion_trace("log_bounded", example, dyadic_schedule(4, 14), tables, a_b=(10.0, 7.5))
    assert all(trace.bound_checks)
    assert [row["bound_ok"] for row in trace.rows()] == trace.bound_checks
    assert trace.params["K"] == 1.0


def test_log_bounded_bound_detects_violation(tables, half):
    trace = criterion_trace("log_bounded", half, dyadic_schedule(2, 8), tables, a_b=(0.0, 0.5), K=1.0)
    # f = 1/2 > log^0(n)/n once n >= 3
    assert trace.bound_checks[0] is False


def test_full_fraction_positive_has_aux_column(tables, half):
    trace = criterion_trace("full_fraction_positive", half, dyadic_schedule(4, 10), tables)
    assert trace.aux_quotients is not None
    assert set(trace.rows()[0]) == {"N", "quotient", "aux_quotient"}
    assert "quotients" not in trace.header()
    assert trace.header()["trend_rule"]["diverging_factor"] == 1.5


def test_hausdorff_weighting(tables, half):
    checkpoints = dyadic_schedule(4, 10)
    plain = criterion_trace("hausdorff", half, checkpoints, tables, h=np.sqrt)
    weighted = criterion_trace("hausdorff", half, checkpoints, tables, h=np.sqrt, phi_weighted=True)
    assert weighted.params["phi_weighted"] is True
    assert all(w >= p for w, p in zip(weighted.quotients, plain.quotients))


def test_volume_partial_sums(tables, half):
    trace = criterion_trace("volume_series", half, [10, 100], tables, s=1.0)
    phi = tables.totient[1:11]
    expected = math.fsum((phi / (2.0 * np.arange(1, 11))).tolist())
    assert trace.quotients[0] == pytest.approx(expected)
    with pytest.raises(ValidationError):
        criterion_trace("volume_series", half, [10], tables, s=1.5)


@pytest.mark.parametrize("kind", [k for k in KINDS if k not in ("hausdorff", "log_bounded")])
def test_every_kind_runs(tables, half, kind):
    trace = criterion_trace(kind, half, dyadic_schedule(4, 9), tables)
    assert len(trace.quotients) == 6
    assert all(math.isfinite(q) and q >= 0 for q in trace.quotients)


def test_trace_argument_errors(tables, half):
    with pytest.raises(ValidationError):
        criterion_trace("hausdorff", half, [16, 32], tables)
    with pytest.raises(ValidationError):
        criterion_trace("log_bounded", half, [16, 32], tables)
    with pytest.raises(ValidationError):
        criterion_trace("duffin_schaeffer", half, [16, 32], tables, a_b=(1.0, 1.0))
    with pytest.raises(ValidationError):
        criterion_trace("duffin_schaeffer", half, [32, 16], tables)
    with pytest.raises(ValidationError):
        criterion_trace("nope", half, [16], tables)
