import math

import pytest

from approx_sets import canonicalize
from counting import expected_count
from dimension import (
    box_count_estimate,
    box_count_table,
    c_alpha,
    closed_form_dimension,
    count_cells,
    default_alpha_grid,
    default_resolution,
    dyadic_schedule,
    volume_partial_sum,
    counting_dimension,
    lower_order,
)
from errors import DegenerateInputError, ValidationError
from profiles import make_profile

GRID = default_alpha_grid()


def test_default_grid():
    assert GRID[0] == 1.0
    assert GRID[-1] == 6.0
    assert len(GRID) == 101
    assert {2.0, 3.0, 4.0} <= set(GRID)


def test_dyadic_schedule():
    assert dyadic_schedule(3, 6) == [8, 16, 32, 64]


@pytest.mark.parametrize("tau", [2, 3])
def test_c_alpha_power(tau):
    p = make_profile("power", {"tau": tau})
    assert c_alpha(tau, 500, p) == 500
    assert c_alpha(tau + 0.5, 500, p) == 500
    assert c_alpha(tau - 0.5, 500, p) == 1


def test_c_alpha_constant(half):
    assert c_alpha(1.0, 100, half) == 0
    assert c_alpha(2.0, 100, half) == 99


def test_c_alpha_validation(half):
    with pytest.raises(ValidationError):
        c_alpha(0.5, 10, half)
    with pytest.raises(ValidationError):
        c_alpha(2.0, 0, half)


@pytest.mark.parametrize("tau", [2, 3, 4])
def test_counting_dimension_power(tau):
    report = counting_dimension(make_profile("power", {"tau": tau}), 1 << 14, GRID)
    assert report.counting_dimension == pytest.approx(min(1.0, 2.0 / tau), abs=1e-9)
    assert report.closed_form_dimension == pytest.approx(2.0 / tau, abs=1e-9)
    assert report.lower_order_hat == pytest.approx(tau - 1.0, abs=1e-9)
    assert report.checkpoints == dyadic_schedule(7, 14)
    assert report.c_alpha_at_checkpoints[float(tau)] == report.checkpoints


def test_counting_dimension_constant(half):
    report = counting_dimension(half, 1 << 10, GRID)
    assert report.counting_dimension == 1.0
    assert report.closed_form_dimension == 1.0
    assert set(report.to_dict()["delta_hat"]) == {repr(a) for a in GRID}


def test_counting_dimension_validation(half):
    with pytest.raises(ValidationError):
        counting_dimension(half, 1000, GRID)
    with pytest.raises(ValidationError):
        counting_dimension(half, 1024, [0.5, 2.0])
    with pytest.raises(ValidationError):
        counting_dimension(half, 1024, [2.0, 1.5])
    with pytest.raises(ValidationError):
        counting_dimension(half, 1024, [])


def test_closed_form_dimension():
    assert closed_form_dimension(0.0) == 1.0
    assert closed_form_dimension(3.0) == 0.5
    assert closed_form_dimension(-2.0) == 1.0


def test_lower_order(half):
    assert lower_order(half, 2, 1024) == pytest.approx(math.log(2) / math.log(1024))
    with pytest.raises(DegenerateInputError):
        lower_order(make_profile("constant", {"value": 0.0}), 2, 100)
    with pytest.raises(ValidationError):
        lower_order(half, 1, 100)


def test_volume_partial_sum(tables, half):
    assert volume_partial_sum(half, 1.0, 300, tables) == pytest.approx(expected_count(300, half, tables) / 2)
    with pytest.raises(ValidationError):
        volume_partial_sum(half, 0.0, 300, tables)


def test_default_resolution():
    assert default_resolution(1 / 8) == 3
    assert default_resolution(0.1) == 4


def test_count_cells():
    assert count_cells(canonicalize([0.1], [0.3]), 3) == 3
    assert count_cells(canonicalize([0.1, 0.22], [0.2, 0.3]), 3) == 3
    assert count_cells(canonicalize([], []), 5) == 0
    assert count_cells(canonicalize([0.0], [1.0]), 4) == 16


def test_box_count_power(tables):
    p = make_profile("power", {"tau": 3})
    table = box_count_table(p, dyadic_schedule(5, 9), tables)
    assert table["slope"] == pytest.approx(2.0 / 3.0, abs=0.1)
    assert [pt["N"] for pt in table["points"]] == dyadic_schedule(5, 9)
    assert all(pt["j"] == default_resolution(pt["r_min"]) for pt in table["points"])


def test_box_count_is_shift_stable(tables):
    p = make_profile("power", {"tau": 3})
    schedule = dyadic_schedule(5, 9)
    estimates = [box_count_estimate(p, schedule, tables, shift_override=t) for t in (0.0, 0.25, 0.5)]
    estimates.append(box_count_estimate(p, schedule, tables, reduced=False))
    assert max(estimates) - min(estimates) <= 0.1


def test_box_count_validation(tables, half):
    with pytest.raises(ValidationError):
        box_count_table(half, [32, 64], tables)
    with pytest.raises(ValidationError):
        box_count_table(half, [32, 128, 64], tables)
    with pytest.raises(ValidationError):
        box_count_table(half, [32, 64, 128], tables, window="sliding")
    with pytest.raises(DegenerateInputError):
        box_count_table(make_profile("constant", {"value": 0.0}), [32, 64, 128], tables)


def test_c_alpha_is_monotone(random_table_profile):
    profiles = [random_table_profile(range(1, 2001)), make_profile("power", {"tau": 3.0})]
    alphas = [1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0, 6.0]
    for profile in profiles:
        for N in (10, 100, 2000):
            by_alpha = [c_alpha(alpha, N, profile) for alpha in alphas]
            assert by_alpha == sorted(by_alpha)
        for alpha in alphas:
            by_N = [c_alpha(alpha, N, profile) for N in (1, 10, 100, 1000, 2000)]
            assert by_N == sorted(by_N)
