import math

import numpy as np
import pytest

from approx_sets import (
    EMPTY,
    arcs_for,
    canonicalize,
    clip,
    complement_measure,
    contains,
    intersect,
    intersection_measure,
    measure,
    union,
    union_measure,
)
from errors import CapacityError
from profiles import make_profile


def test_wrapping_arc_is_split():
    s = canonicalize([-0.1], [0.1])
    assert s.arcs == [(0.0, pytest.approx(0.1)), (pytest.approx(0.9), 1.0)]
    assert measure(s) == pytest.approx(0.2)


def test_long_arc_is_full_circle():
    s = canonicalize([0.2], [1.3])
    assert s.arcs == [(0.0, 1.0)]
    assert measure(s) == 1.0


def test_overlapping_arcs_merge():
    s = canonicalize([0.1, 0.15], [0.2, 0.3])
    assert len(s) == 1
    assert measure(s) == pytest.approx(0.2)


def test_empty_inputs():
    assert canonicalize([], []).is_empty
    assert canonicalize([0.3], [0.3]).is_empty
    assert measure(EMPTY) == 0.0
    assert complement_measure(EMPTY) == 1.0


def test_canonical_arrays_are_read_only():
    s = canonicalize([0.1], [0.2])
    assert not s.starts.flags.writeable
    assert not s.ends.flags.writeable


def test_clip_does_not_wrap():
    s = clip([-0.1], [0.1])
    assert s.arcs == [(0.0, pytest.approx(0.1))]


def test_a2_and_a3_at_half(tables, half):
    a2 = arcs_for(2, half, True, tables)
    a3 = arcs_for(3, half, True, tables)
    assert a2.arcs == [(0.25, 0.75)]
    assert measure(a3) == pytest.approx(2 / 3, abs=1e-12)
    assert intersection_measure(a2, a3) == pytest.approx(0.5, abs=1e-12)
    assert measure(intersect(a2, a3)) == pytest.approx(0.5, abs=1e-12)
    assert union_measure([a2, a3]) == pytest.approx(2 / 3, abs=1e-12)


def test_a1_at_half_is_full_circle(tables, half):
    assert measure(arcs_for(1, half, True, tables)) == 1.0


def test_full_fractions_cover_more(tables, half):
    assert measure(arcs_for(2, half, False, tables)) == pytest.approx(1.0)
    quarter = make_profile("constant", {"value": 0.25})
    assert measure(arcs_for(6, quarter, False, tables)) == pytest.approx(0.5)
    assert measure(arcs_for(6, quarter, True, tables)) == pytest.approx(2 * 0.25 / 6 * 2)


def test_contains_is_strict(tables, half):
    a2 = arcs_for(2, half, True, tables)
    assert contains(a2, 0.5)
    assert not contains(a2, 0.25)
    assert not contains(a2, 0.8)
    assert contains(canonicalize([-0.1], [0.1]), 0.0)
    assert contains(a2, 1.5)


def test_shift_moves_centers(tables):
    p = make_profile("constant", {"value": 0.1, "theta": 0.5})
    a = arcs_for(2, p, True, tables)
    # center (1 + 0.5)/2 = 0.75, radius 0.05
    assert a.arcs == [(pytest.approx(0.7), pytest.approx(0.8))]


def test_zero_profile_gives_empty(tables):
    p = make_profile("constant", {"value": 0.0})
    assert arcs_for(5, p, True, tables).is_empty


def test_arcs_for_checks_tables(tables, half):
    with pytest.raises(CapacityError):
        arcs_for(tables.limit + 1, half, True, tables)


@pytest.mark.parametrize("n", [1, 2, 3, 7, 12, 30, 97, 210, 999, 2310])
def test_measure_formula(tables, random_table_profile, n):
    p = random_table_profile([n])
    expected = 2 * p.f(n) / n * int(tables.totient[n])
    assert abs(measure(arcs_for(n, p, True, tables)) - expected) <= 1e-12


def test_union_and_intersect_against_grid(tables, random_table_profile):
    p = random_table_profile([5, 8, 9])
    sets = [arcs_for(n, p, True, tables) for n in (5, 8, 9)]
    grid = (np.arange(20_000) + 0.5) / 20_000
    inside = np.array([[contains(s, x) for x in grid] for s in sets])
    assert union_measure(sets) == pytest.approx(inside.any(axis=0).mean(), abs=2e-3)
    assert intersection_measure(sets[0], sets[1]) == pytest.approx(
        (inside[0] & inside[1]).mean(), abs=2e-3
    )
    assert measure(union(sets)) == union_measure(sets)


def test_contains_tiny_negative_point():
    wrapping = canonicalize([-0.1], [0.1])
    assert contains(wrapping, -1e-300)
    assert contains(wrapping, -1e-17)


def direct_scan(x, n, profile):
    """Strict inequality ||x - (m + theta)/n|| < f(n)/n over reduced m."""
    radius = profile.f(n) / n
    theta = profile.theta(n)
    for m in range(1, n + 1):
        if math.gcd(m, n) != 1:
            continue
        gap = abs((x - (m + theta) / n + 0.5) % 1.0 - 0.5)
        if gap < radius:
            return True
    return False


def test_contains_matches_direct_scan(tables, rng, random_table_profile):
    profile = random_table_profile(range(1, 201))
    sets = {n: arcs_for(n, profile, True, tables) for n in range(1, 201)}
    ns = rng.integers(1, 201, size=10_000)
    xs = rng.random(10_000)
    for n, x in zip(ns.tolist(), xs.tolist()):
        assert contains(sets[n], x) == direct_scan(x, n, profile)


def same_arcs(a, b):
    assert len(a) == len(b)
    assert np.allclose(a.starts, b.starts, rtol=0, atol=1e-12)
    assert np.allclose(a.ends, b.ends, rtol=0, atol=1e-12)


def test_canonicalize_is_idempotent(tables, random_table_profile):
    profile = random_table_profile([3, 7, 12, 30, 97])
    for n in (3, 7, 12, 30, 97):
        once = arcs_for(n, profile, True, tables)
        same_arcs(canonicalize(once.starts, once.ends), once)
    merged = union([arcs_for(n, profile, True, tables) for n in (3, 7, 12)])
    same_arcs(canonicalize(merged.starts, merged.ends), merged)


def test_intersect_commutes_and_associates(tables, random_table_profile):
    profile = random_table_profile([5, 8, 9, 14])
    a, b, c, d = (arcs_for(n, profile, True, tables) for n in (5, 8, 9, 14))
    same_arcs(intersect(a, b), intersect(b, a))
    same_arcs(intersect(intersect(a, b), c), intersect(a, intersect(b, c)))
    same_arcs(intersect(union([a, d]), c), intersect(c, union([d, a])))


@pytest.mark.parametrize("n", [1, 2, 6, 12, 35, 97, 210])
def test_reduced_set_inside_full_fraction_set(tables, random_table_profile, n):
    profile = random_table_profile([n])
    reduced = arcs_for(n, profile, True, tables)
    full = arcs_for(n, profile, False, tables)
    assert intersection_measure(reduced, full) == pytest.approx(measure(reduced), abs=1e-12)
