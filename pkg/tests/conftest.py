import os
import random
import tempfile

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

# keep the catalogue cache out of the user's home during tests
os.environ.setdefault("BLOCKADE_CACHE", tempfile.mkdtemp(prefix="blockade-cache-"))
os.environ.pop("BLOCKADE_PROFILE", None)

from blockade.graph import Graph  # noqa: E402
from blockade.profile import get_profile  # noqa: E402

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


def random_graph(n: int, p: float, seed: int) -> Graph:
    rng = random.Random(seed)
    return Graph.from_edges(n, [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < p])


@st.composite
def graphs(draw, min_n=0, max_n=12):
    n = draw(st.integers(min_n, max_n))
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    picks = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    return Graph.from_edges(n, [p for p, keep in zip(pairs, picks) if keep])


@pytest.fixture
def demo():
    return get_profile("demo-small")


def mask(*vs):
    m = 0
    for v in vs:
        m |= 1 << v
    return m


def perfect_matching(k: int) -> tuple[Graph, int, int]:
    """Sides ``a = 0..k-1`` and ``b = k..2k-1`` of a perfect matching."""
    g = Graph.from_edges(2 * k, [(i, k + i) for i in range(k)])
    return g, (1 << k) - 1, ((1 << (2 * k)) - 1) ^ ((1 << k) - 1)
