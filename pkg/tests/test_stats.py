import itertools
import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ergmselect.graph import Graph, from_edge_list
from ergmselect.stats import (ModelError, ModelSpec, StatKind, Statistic, change_statistics, compute_statistics,
                              cov_homophily, cov_main, degree_histogram, edges, esp_histogram, fourcycle, gwd,
                              gwesp, load_models, threestar, triangle, twostar)

from conftest import ALL_STATS, covariates_for, graphs, random_graph


def brute_force(g: Graph, covs, stat: Statistic) -> float:
    """Direct definitions, written independently of the kernels."""
    A = g.adjacency.astype(int)
    n = g.n
    deg = A.sum(axis=1)
    pairs = list(itertools.combinations(range(n), 2))
    k = stat.kind
    if k == StatKind.EDGES:
        return sum(A[i, j] for i, j in pairs)
    if k == StatKind.TWOSTAR:
        return sum(math.comb(int(d), 2) for d in deg)
    if k == StatKind.THREESTAR:
        return sum(math.comb(int(d), 3) for d in deg)
    if k == StatKind.TRIANGLE:
        return sum(A[a, b] * A[b, c] * A[a, c] for a, b, c in itertools.combinations(range(n), 3))
    if k == StatKind.FOURCYCLE:
        # each 4-cycle on nodes {a,b,c,d} is one of three possible cyclic orders
        total = 0
        for a, b, c, d in itertools.combinations(range(n), 4):
            for p, q, r, s in ((a, b, c, d), (a, b, d, c), (a, c, b, d)):
                total += A[p, q] * A[q, r] * A[r, s] * A[s, p]
        return total
    w = lambda m: math.exp(stat.decay) * (1 - (1 - math.exp(-stat.decay)) ** m)  # noqa: E731
    if k == StatKind.GWD:
        return sum(w(int(d)) for d in deg)
    if k == StatKind.GWESP:
        return sum(w(int(A[i] @ A[j])) for i, j in pairs if A[i, j])
    x = covs[stat.covariate].values
    if k == StatKind.COVMAIN:
        return sum(A[i, j] * (x[i] + x[j]) for i, j in pairs)
    if k == StatKind.COVHOMOPHILY:
        return sum(A[i, j] * (x[i] == x[j]) for i, j in pairs)
    raise AssertionError(k)


def test_worked_examples():
    k3 = Graph.complete(3)
    m = ModelSpec(1, (edges(), twostar(), triangle()))
    np.testing.assert_array_equal(compute_statistics(k3, None, m), [3, 3, 1])
    assert compute_statistics(Graph.complete(4), None, ModelSpec(1, (fourcycle(),)))[0] == 3
    path = from_edge_list(3, [(1, 2), (2, 3)])
    assert compute_statistics(path, None, ModelSpec(1, (triangle(),)))[0] == 0


def test_gw_statistics_on_triangle():
    # K3: every node has degree 2, every edge has one shared partner
    m = ModelSpec(1, (gwd(math.log(2)), gwesp(math.log(2))))
    np.testing.assert_allclose(compute_statistics(Graph.complete(3), None, m), [3 * 1.5, 3 * 1.0])


def test_covariate_statistics():
    from ergmselect.graph import NodeCovariate
    covs = {"g": NodeCovariate("g", np.array([1.0, 1.0, 2.0]))}
    m = ModelSpec(1, (cov_main("g"), cov_homophily("g")))
    g = from_edge_list(3, [(1, 2)])
    np.testing.assert_array_equal(compute_statistics(g, covs, m), [2, 1])


def test_histograms():
    star = from_edge_list(4, [(1, 2), (1, 3), (1, 4)])
    np.testing.assert_array_equal(degree_histogram(star), [0, 3, 0, 1])
    np.testing.assert_array_equal(esp_histogram(star), [3, 0, 0])


@pytest.mark.parametrize("seed", range(8))
def test_full_statistics_match_brute_force(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(3, 10))
    g = random_graph(n, rng.uniform(0.1, 0.9), rng)
    covs = covariates_for(n, rng)
    m = ModelSpec(1, ALL_STATS)
    got = compute_statistics(g, covs, m)
    want = [brute_force(g, covs, s) for s in ALL_STATS]
    np.testing.assert_allclose(got, want, rtol=1e-12, atol=1e-12)


def test_change_statistics_on_200_random_graphs():
    rng = np.random.default_rng(7)
    m = ModelSpec(1, ALL_STATS)
    for _ in range(200):
        n = int(rng.integers(2, 14))
        g = random_graph(n, rng.uniform(0.05, 0.95), rng)
        covs = covariates_for(n, rng)
        i, j = rng.choice(n, 2, replace=False)
        delta = change_statistics(g, covs, m, int(i), int(j))
        full = compute_statistics(g.toggle(int(i), int(j)), covs, m) - compute_statistics(g, covs, m)
        np.testing.assert_allclose(delta, full, atol=1e-9)


@given(graphs(), st.data())
def test_change_statistics_property(g, data):
    i = data.draw(st.integers(0, g.n - 1))
    j = data.draw(st.integers(0, g.n - 1).filter(lambda v: v != i))
    covs = covariates_for(g.n)
    m = ModelSpec(1, ALL_STATS)
    delta = change_statistics(g, covs, m, i, j)
    back = change_statistics(g.toggle(i, j), covs, m, i, j)
    np.testing.assert_allclose(delta, -back, atol=1e-9)
    np.testing.assert_allclose(compute_statistics(g, covs, m) + delta,
                               compute_statistics(g.toggle(i, j), covs, m), atol=1e-9)


@given(graphs(min_n=3, max_n=8), st.randoms(use_true_random=False))
def test_relabelling_invariance(g, rnd):
    perm = list(range(g.n))
    rnd.shuffle(perm)
    m = ModelSpec(1, ALL_STATS[:7])
    h = Graph(g.adjacency[np.ix_(perm, perm)])
    np.testing.assert_allclose(compute_statistics(g, None, m), compute_statistics(h, None, m), atol=1e-9)


@pytest.mark.parametrize("kw", [
    dict(kind=StatKind.GWD, decay=0.0), dict(kind=StatKind.GWESP, decay=float("inf")),
    dict(kind=StatKind.EDGES, decay=1.0), dict(kind=StatKind.COVMAIN),
    dict(kind=StatKind.TRIANGLE, covariate="x"),
])
def test_statistic_validation(kw):
    with pytest.raises(ModelError):
        Statistic(**kw)


def test_unknown_covariate_is_rejected():
    m = ModelSpec(1, (edges(), cov_main("nope")))
    with pytest.raises(ModelError, match="nope"):
        compute_statistics(Graph.empty(3), {}, m)


def test_model_prior():
    m = ModelSpec(1, (edges(), triangle()))
    np.testing.assert_array_equal(m.prior_cov, 100 * np.eye(2))
    assert m.log_prior([0.0, 0.0]) == pytest.approx(-math.log(2 * math.pi * 100))
    with pytest.raises(ModelError):
        ModelSpec(1, (edges(),), prior_cov=[[-1.0]])
    with pytest.raises(ModelError):
        ModelSpec(1, ())


def test_extend_keeps_prior_blocks():
    m = ModelSpec(1, (edges(),), prior_cov=[[4.0]]).extend(triangle(), id=2, prior_var=9.0)
    assert m.id == 2 and m.dim == 2
    np.testing.assert_array_equal(m.prior_cov, np.diag([4.0, 9.0]))


def test_load_models(tmp_path):
    cfg = {"models": [
        {"id": 1, "statistics": [{"type": "edges"}], "prior_sd_diag": 10},
        {"id": 2, "statistics": [{"type": "edges"}, {"type": "gwesp", "decay": "log(2)"}],
         "prior_mean": [0, 1], "prior_cov": [[4, 0], [0, 1]]},
        {"id": 3, "statistics": [{"type": "gwd"}]},
    ]}
    p = tmp_path / "m.json"
    p.write_text(json.dumps(cfg))
    m1, m2, m3 = load_models(p)
    np.testing.assert_array_equal(m1.prior_cov, [[100.0]])
    assert m2.statistics[1].decay == pytest.approx(math.log(2))
    np.testing.assert_array_equal(m2.prior_mean, [0, 1])
    assert m3.statistics[0].decay == pytest.approx(math.log(2))
    assert ModelSpec.from_dict(m2.to_dict()).same_structure(m2)


def test_load_models_rejects_unknown_statistic(tmp_path):
    p = tmp_path / "m.json"
    p.write_text(json.dumps({"id": 1, "statistics": [{"type": "kstar"}]}))
    with pytest.raises(ModelError, match="kstar"):
        load_models(p)
