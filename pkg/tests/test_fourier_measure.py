import math

import numpy as np
import pytest

import config
from approx_sets import arcs_for, intersection_measure, measure
from errors import BudgetError, DegenerateInputError, ValidationError
from fourier_measure import (
    absolute_series_bound,
    borel_cantelli_ratio,
    coefficient,
    divisor_moment_sum,
    intersection_series,
    analytic_truncation,
    parseval_sum,
    second_moment_bound,
    series_closed_form,
    series_truncation,
)
from profiles import make_profile


def exact_coefficient(arc_set, k):
    """Integral of the indicator against e^(2 pi i k x), arc by arc."""
    if k == 0:
        return complex(measure(arc_set))
    total = 0j
    for a, b in arc_set.arcs:
        total += (np.exp(2j * np.pi * k * b) - np.exp(2j * np.pi * k * a)) / (2j * np.pi * k)
    return total


@pytest.mark.parametrize("n", [1, 2, 5, 6, 12])
def test_coefficients_match_indicator(tables, random_table_profile, n):
    p = random_table_profile([n])
    arcs = arcs_for(n, p, True, tables)
    for k in (0, 1, 2, 3, 7, 12, 25):
        assert coefficient(n, k, p, tables) == pytest.approx(exact_coefficient(arcs, k), abs=1e-12)


def test_truncation_rule(tables):
    assert series_truncation(2, 3, 1e-4, tables) == math.ceil(2 / math.pi ** 2 * 2 / 1e-4)
    with pytest.raises(ValidationError):
        series_truncation(2, 3, 0.0, tables)


def test_analytic_truncation(tables):
    assert analytic_truncation(2, 3, tables) == 2 * 2 * 1 * 16 * 81


def test_series_for_a2_a3(tables, half):
    result = intersection_series(2, 3, half, 1e-4, tables)
    assert result.truncation_M == series_truncation(2, 3, 1e-4, tables)
    assert abs(result.value - 0.5) <= result.tail_bound
    assert result.tail_bound <= 1e-4


@pytest.mark.parametrize("n,m", [(1, 1), (2, 2), (3, 5), (4, 6), (7, 7), (8, 5)])
def test_series_within_tail_of_sweep(tables, random_table_profile, n, m):
    p = random_table_profile({n, m})
    exact = intersection_measure(arcs_for(n, p, True, tables), arcs_for(m, p, True, tables))
    result = intersection_series(n, m, p, 1e-4, tables)
    assert abs(result.value - exact) <= result.tail_bound + 1e-12


def test_closed_form_matches_sweep(tables, rng, random_table_profile):
    for _ in range(60):
        n, m = (int(v) for v in rng.integers(1, 61, size=2))
        p = random_table_profile({n, m})
        exact = intersection_measure(arcs_for(n, p, True, tables), arcs_for(m, p, True, tables))
        assert series_closed_form(n, m, p, tables) == pytest.approx(exact, abs=1e-9)


def test_closed_form_at_half(tables, half):
    assert series_closed_form(2, 3, half, tables) == pytest.approx(0.5, abs=1e-12)
    assert series_closed_form(1, 1, half, tables) == pytest.approx(1.0, abs=1e-12)


def test_closed_form_with_empty_arcs(tables):
    zero = make_profile("constant", {"value": 0.0})
    assert series_closed_form(4, 9, zero, tables) == 0.0


def test_absolute_series_is_an_upper_bound(tables, random_table_profile):
    p = random_table_profile([6, 10])
    exact = intersection_measure(arcs_for(6, p, True, tables), arcs_for(10, p, True, tables))
    bound = absolute_series_bound(6, 10, p, 1e-4, tables)
    assert bound.value + bound.tail_bound >= exact


@pytest.mark.parametrize("n", [1, 4, 9])
def test_parseval_reproduces_measure(tables, random_table_profile, n):
    p = random_table_profile([n])
    result = parseval_sum(n, p, 1e-4, tables)
    assert abs(result.value - measure(arcs_for(n, p, True, tables))) <= result.tail_bound + 1e-12


def test_series_budget(tables, half):
    with pytest.raises(BudgetError) as info:
        intersection_series(199, 197, half, 1e-9, tables)
    assert info.value.required > config.SERIES_TERM_BUDGET


def test_series_needs_standard_range(tables):
    p = make_profile("power", {"tau": 1.5})
    with pytest.raises(ValidationError):
        intersection_series(1, 2, p, 1e-3, tables)


def test_moment_sums(tables, half):
    assert divisor_moment_sum(1, half, tables) == pytest.approx(0.5 * 1 * 4.0)
    assert second_moment_bound(50, half, tables) == divisor_moment_sum(50, half, tables)


def test_borel_cantelli_single_term(tables, half):
    assert borel_cantelli_ratio(1, half, True, tables) == pytest.approx(1.0)


def test_borel_cantelli_modes_agree(tables, random_table_profile):
    p = random_table_profile(range(1, 33))
    exact = borel_cantelli_ratio(32, p, True, tables, mode="exact")
    closed = borel_cantelli_ratio(32, p, True, tables, mode="closed")
    assert closed == pytest.approx(exact, rel=1e-9)
    series = borel_cantelli_ratio(8, p, True, tables, mode="series", tol=1e-5)
    assert series == pytest.approx(borel_cantelli_ratio(8, p, True, tables), rel=1e-3)


def test_borel_cantelli_is_worker_independent(tables, random_table_profile):
    p = random_table_profile(range(1, 13))
    assert borel_cantelli_ratio(12, p, True, tables, workers=2) == borel_cantelli_ratio(12, p, True, tables)


def test_borel_cantelli_errors(tables, half):
    with pytest.raises(ValidationError):
        borel_cantelli_ratio(4, half, False, tables, mode="series")
    with pytest.raises(ValidationError):
        borel_cantelli_ratio(4, half, True, tables, mode="bogus")
    with pytest.raises(BudgetError):
        borel_cantelli_ratio(1001, half, True, tables)
    with pytest.raises(DegenerateInputError):
        borel_cantelli_ratio(5, make_profile("constant", {"value": 0.0}), True, tables)
