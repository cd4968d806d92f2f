import numpy as np
import pytest
from hypothesis import HealthCheck, settings, strategies as st

from planted_clique.core import Mask

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@st.composite
def masks(draw, min_n=2, max_n=12, min_edges=0, max_edges=None):
    """Random masks as sets of distinct unordered pairs over 1..n."""
    n = draw(st.integers(min_n, max_n))
    pairs = [(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)]
    cap = len(pairs) if max_edges is None else min(max_edges, len(pairs))
    chosen = draw(st.lists(st.sampled_from(pairs), min_size=min(min_edges, cap), max_size=cap,
                           unique=True)) if pairs else []
    return Mask.from_pairs(n, chosen)


def random_mask_np(rng: np.random.Generator, n: int, p: float) -> Mask:
    i, j = np.triu_indices(n, 1)
    keep = rng.random(i.size) < p
    return Mask(n, np.column_stack((i[keep] + 1, j[keep] + 1)))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    import sys
    module = sys.modules.get("test_acceptance")
    lines = getattr(module, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
