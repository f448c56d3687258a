import numpy as np
import pytest
from hypothesis import settings
from hypothesis import strategies as st

from ergmselect.graph import Graph, NodeCovariate
from ergmselect.stats import (ModelSpec, cov_homophily, cov_main, edges, fourcycle, gwd, gwesp, threestar,
                              triangle, twostar)

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


def random_graph(n, p, rng):
    upper = np.triu(rng.random((n, n)) < p, 1)
    return Graph((upper | upper.T).astype(np.uint8))


@st.composite
def graphs(draw, min_n=2, max_n=9):
    n = draw(st.integers(min_n, max_n))
    bits = draw(st.lists(st.booleans(), min_size=n * (n - 1) // 2, max_size=n * (n - 1) // 2))
    adj = np.zeros((n, n), dtype=np.uint8)
    adj[np.triu_indices(n, 1)] = bits
    return Graph(adj + adj.T)


def covariates_for(n, rng=None):
    rng = rng or np.random.default_rng(0)
    return {"group": NodeCovariate("group", rng.integers(0, 3, n).astype(float)),
            "age": NodeCovariate("age", rng.normal(size=n))}


ALL_STATS = (edges(), twostar(), threestar(), triangle(), fourcycle(), gwd(), gwesp(0.7),
             cov_main("age"), cov_homophily("group"))


@pytest.fixture
def all_model():
    return ModelSpec("all", ALL_STATS)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    if mod is not None and mod.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in mod.RESULTS:
            terminalreporter.write_line(line)
