import functools

import pytest

from greedy_ldp import oracle


@functools.lru_cache(maxsize=None)
def _dist(n, c):
    return oracle.sg_distribution(n, c)


@pytest.fixture(scope="session")
def exact_distribution():
    """Cached ``sg_distribution`` lookup shared across test modules."""
    return _dist
