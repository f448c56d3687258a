import math

import numpy as np
import pytest
from scipy.stats import chisquare

from ergmselect.exact import stat_table
from ergmselect.graph import Graph
from ergmselect.sampler import NetworkSimulator, SimConfig, expected_stats, sample_statistics, simulate_network
from ergmselect.stats import ModelSpec, edges, fourcycle, triangle, twostar


def test_simconfig_validation():
    with pytest.raises(ValueError):
        SimConfig(iterations=0)
    with pytest.raises(ValueError):
        SimConfig(init="given")
    with pytest.raises(ValueError):
        SimConfig(init="random")


@pytest.mark.parametrize("n", [3, 4])
def test_stationary_distribution_matches_enumeration(n):
    # compare the law of the statistic vector with the exact ERGM on all graphs
    m = ModelSpec(1, (edges(), triangle(), fourcycle()) if n == 4 else (edges(), triangle()))
    theta = np.array([0.4, -0.8, 0.5][: m.dim])
    table = stat_table(m, n)
    p = table.probabilities(theta)
    rec = sample_statistics(theta, m, None, 20_000, SimConfig(iterations=20, burn_in=500), np.random.default_rng(n), n=n)
    keys = {tuple(r): i for i, r in enumerate(table.stats)}
    counts = np.bincount([keys[tuple(r)] for r in rec], minlength=len(p))
    assert chisquare(counts, p * counts.sum()).pvalue > 1e-3


def test_bernoulli_edge_mean():
    n, theta = 16, -1.0
    mean = expected_stats([theta], ModelSpec(1, (edges(),)), None, 4000,
                          SimConfig(iterations=200, burn_in=2000), np.random.default_rng(1), n=n)
    want = math.comb(n, 2) / (1 + math.exp(-theta))
    assert mean[0] == pytest.approx(want, rel=0.02)


def test_same_generator_seed_gives_same_draws():
    m = ModelSpec(1, (edges(), twostar()))
    cfg = SimConfig(iterations=50, burn_in=100)
    a = sample_statistics([-1.0, 0.05], m, None, 30, cfg, np.random.default_rng(3), n=10)
    b = sample_statistics([-1.0, 0.05], m, None, 30, cfg, np.random.default_rng(3), n=10)
    np.testing.assert_array_equal(a, b)


def test_run_tracks_statistics_incrementally():
    m = ModelSpec(1, (edges(), triangle(), fourcycle()))
    sim = NetworkSimulator(m, None, 12)
    adj, s, acc = sim.run([-0.5, 0.1, -0.05], np.zeros((12, 12), np.uint8), 5000, np.random.default_rng(0))
    assert acc > 0
    np.testing.assert_allclose(s, sim.statistics(adj))
    Graph(adj)  # still a valid simple graph


def test_simulate_network_from_observed():
    y = Graph.complete(6)
    g = simulate_network([-10.0], ModelSpec(1, (edges(),)), None, SimConfig(iterations=2000, init="observed"),
                         np.random.default_rng(0), observed=y)
    assert g.edge_count < 3


def test_theta_shape_checked():
    from ergmselect.stats import ModelError
    sim = NetworkSimulator(ModelSpec(1, (edges(),)), None, 4)
    with pytest.raises(ModelError):
        sim.run([0.0, 1.0], np.zeros((4, 4), np.uint8), 10, np.random.default_rng(0))
