import numpy as np
import pytest

from arith_core import build_tables
from battery import random_table_profile as random_profile
from profiles import make_profile

TABLE_LIMIT = 1 << 17


@pytest.fixture(scope="session")
def tables():
    return build_tables(TABLE_LIMIT)


@pytest.fixture
def half():
    return make_profile("constant", {"value": 0.5})


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture
def random_table_profile(rng):
    """Table profile with uniform f and theta in [0, 1/2] at each requested n."""
    return lambda ns: random_profile(rng, ns)
