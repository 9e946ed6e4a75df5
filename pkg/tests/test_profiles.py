import math

import numpy as np
import pytest

from arith_core import safe_log_array
from criteria import divisor_bounded_density
from errors import ValidationError
from profiles import FRange, list_families, load_table_file, make_profile
from profiles.families import divisor_counts


def test_registry_lists_every_family():
    assert set(list_families()) == {
        "power", "constant", "factorial-blocks", "table", "user-file", "divisor-bounded",
    }


def test_unknown_family():
    with pytest.raises(ValidationError):
        make_profile("nope", {})


def test_power_profile():
    p = make_profile("power", {"tau": 3})
    assert p.f_range is FRange.EXTENDED
    assert p.f(1) == 1.0
    assert p.f(2) == pytest.approx(0.25)
    assert p.epsilon(2) == pytest.approx(0.125)
    assert p.is_monotone


@pytest.mark.parametrize("family,params", [
    ("power", {"tau": 1.0}),
    ("constant", {"value": 0.6}),
    ("constant", {"value": 0.5, "theta": 0.7}),
    ("constant", {}),
    ("factorial-blocks", {}),
    ("factorial-blocks", {"cap": 2, "schedule": [1, 2]}),
    ("factorial-blocks", {"schedule": [3, 2]}),
    ("divisor-bounded", {"base": "power"}),
])
def test_invalid_parameters(family, params):
    with pytest.raises(ValidationError):
        make_profile(family, params)


def test_aggregated_parameter_errors():
    with pytest.raises(ValidationError) as info:
        make_profile("constant", {"value": 2.0, "theta": -1.0})
    assert len(info.value.details["problems"]) == 2


def test_dense_values_are_cached_read_only():
    p = make_profile("constant", {"value": 0.25, "theta": 0.1})
    f = p.f_values(10)
    assert f[0] == 0.0
    assert f[1:].tolist() == [0.25] * 10
    assert not f.flags.writeable
    assert p.theta_values(10)[5] == 0.1


def test_with_theta_leaves_original():
    p = make_profile("constant", {"value": 0.25})
    q = p.with_theta(0.3)
    assert q.theta(7) == 0.3
    assert p.theta(7) == 0.0
    with pytest.raises(ValidationError):
        p.with_theta(0.6)


def test_require_standard():
    p = make_profile("power", {"tau": 1.5})
    p.require_standard(9)
    with pytest.raises(ValidationError):
        p.require_standard(1)


def test_factorial_blocks_support():
    p = make_profile("factorial-blocks", {"cap": 2})
    assert p.block_of(8) == 3
    assert p.is_supported(8)
    assert not p.is_supported(9)
    assert p.f(1) == 0.0
    assert p.f(2) == pytest.approx(math.log(2) ** 10 / 2)
    assert p.f(8) == pytest.approx(math.log(8) ** 10 / 8)
    assert p.f(9) == 0.0


def test_factorial_blocks_vector_matches_scalar():
    p = make_profile("factorial-blocks", {"schedule": [0, 1, 2, 3]})
    f = p.f_values(600)
    for n in range(2, 601):
        expected = math.log(n) ** 10 / n if p.is_supported(n) else 0.0
        assert f[n] == pytest.approx(expected, rel=1e-12)


def test_factorial_blocks_is_unbounded():
    p = make_profile("factorial-blocks", {"cap": 1})
    assert p.f_range is FRange.UNBOUNDED
    assert p.f(64) > 0.5


def test_table_profile():
    p = make_profile("table", {"values": {2: (0.3, 0.1)}})
    assert p.f(2) == 0.3
    assert p.theta(2) == 0.1
    assert p.f(3) == 0.0


def test_table_profile_range_check():
    p = make_profile("table", {"values": {2: (0.7, 0.0)}})
    with pytest.raises(ValidationError):
        p.f(2)


def test_load_table_file(tmp_path):
    path = tmp_path / "profile.txt"
    path.write_text("# n f theta\n1 0.5 0\n\n3 0.25 0.1\n")
    assert load_table_file(path) == {1: (0.5, 0.0), 3: (0.25, 0.1)}
    p = make_profile("user-file", {"path": str(path)})
    assert p.f(3) == 0.25
    assert p.f(2) == 0.0


@pytest.mark.parametrize("text", [
    "3 0.1 0\n2 0.1 0\n",
    "1 0.1\n",
    "x 0.1 0\n",
])
def test_load_table_file_rejects(tmp_path, text):
    path = tmp_path / "bad.txt"
    path.write_text(text)
    with pytest.raises(ValidationError):
        load_table_file(path)


def test_divisor_bounded_support():
    p = make_profile("divisor-bounded", {"base": "constant", "value": 0.5, "eps": 0.5})
    assert p.f(1) == 0.5
    assert p.f(12) == 0.0
    assert p.f(13) == 0.5
    mask = p.support_mask(np.arange(1, 1001))
    assert mask.mean() > 0.5


def test_divisor_bounded_support_uses_sieved_divisors(tables):
    p = make_profile("divisor-bounded", {"base": "constant", "value": 0.5, "eps": 0.5})
    N = 5000
    ns = np.arange(1, N + 1)
    expected = tables.divisors[1 : N + 1] <= np.power(safe_log_array(ns), 1.5)
    assert (p.f_values(N)[1:] > 0).tolist() == expected.tolist()
    assert (p.f_values(N)[1:] > 0).mean() == divisor_bounded_density(N, 0.5, tables)
    # a lone large n goes through trial division
    assert divisor_counts(np.array([720720])).tolist() == [240]
