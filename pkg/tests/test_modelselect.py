import math

import numpy as np
import pytest

from ergmselect.exact import grid_posterior
from ergmselect.exchange import ExchangeConfig, GaussianSummary
from ergmselect.graph import from_edge_list
from ergmselect.modelselect import (ModelSpace, PilotTuning, RJState, _Context, auto_rj_step, bayes_factor_matrix,
                                    bma_predictive, check_nested, kass_raftery, load_space, pilot_jump_matrix,
                                    pilot_rj_step, rj_log_ratio, run_selection)
from ergmselect.sampler import SimConfig
from ergmselect.stats import ModelError, ModelSpec, edges, triangle, twostar

Y4 = from_edge_list(4, [(1, 2), (2, 3), (3, 4), (1, 3)])
AUX = SimConfig(iterations=60, init="observed")


def nested_space(sd=2.0):
    m1 = ModelSpec(1, (edges(),), prior_cov=[[sd ** 2]])
    return ModelSpace((m1, m1.extend(triangle(), id=2, prior_var=sd ** 2)))


def offline(m):
    return ExchangeConfig.per_dimension(m.dim, 3000, 200, aux=AUX)


def test_bayes_factor_arithmetic():
    bf = bayes_factor_matrix([900, 100], [0.5, 0.5])
    assert bf[0, 1] == pytest.approx(9.0) and bf[1, 0] == pytest.approx(1 / 9)
    bf = bayes_factor_matrix([900, 100], [0.75, 0.25])
    assert bf[0, 1] == pytest.approx(3.0)


def test_bayes_factor_transitivity():
    counts = np.array([500.0, 300.0, 150.0, 50.0])
    prior = np.array([0.1, 0.2, 0.3, 0.4])
    bf = bayes_factor_matrix(counts, prior)
    for h in range(4):
        for j in range(4):
            for k in range(4):
                assert bf[h, k] == pytest.approx(bf[h, j] * bf[j, k])


def test_bayes_factor_unvisited():
    bf = bayes_factor_matrix([10, 0, 0], np.full(3, 1 / 3))
    assert math.isinf(bf[0, 1]) and bf[1, 0] == 0.0 and math.isnan(bf[1, 2])


@pytest.mark.parametrize("bf,label", [(0.5, "favours the denominator model"), (1.0, "Not worth more than a bare mention"),
                                      (3.0, "Positive"), (19.9, "Positive"), (20.0, "Strong"), (150.0, "Very strong"),
                                      (math.inf, "Very strong"), (math.nan, "undefined")])
def test_kass_raftery(bf, label):
    assert kass_raftery(bf) == label


def test_model_space_validation():
    m = ModelSpec(1, (edges(),))
    with pytest.raises(ModelError):
        ModelSpace(())
    with pytest.raises(ModelError):
        ModelSpace((m, m), model_prior=[0.2, 0.2])
    with pytest.raises(ModelError):
        ModelSpace((m, m), between_jump=[[1.0, 0.0], [0.3, 0.3]])


def test_rj_log_ratio_reciprocity():
    # the reverse move uses the same auxiliary network, so its log ratio is the negative
    a, b = np.array([-1.0]), np.array([-1.2, 0.4])
    s_a_obs, s_a_aux, s_b_obs, s_b_aux = [4.0], [5.0], [4.0, 1.0], [5.0, 2.0]
    fwd = rj_log_ratio(a, b, s_a_obs, s_a_aux, s_b_obs, s_b_aux, -1.0, -2.5, 0.7)
    bwd = rj_log_ratio(b, a, s_b_obs, s_b_aux, s_a_obs, s_a_aux, -2.5, -1.0, -0.7)
    assert fwd == pytest.approx(-bwd)


def test_degenerate_auto_rj_ratio_is_one():
    theta = np.array([-0.5])
    assert rj_log_ratio(theta, theta, [3.0], [6.0], [3.0], [6.0], -1.0, -1.0) == 0.0
    space = ModelSpace((ModelSpec(1, (edges(),)),))

    class PointSummary(GaussianSummary):
        def sample(self, rng):
            return self.mean.copy()

    gs = [PointSummary(theta, [[0.3]])]
    rng = np.random.default_rng(0)
    state = RJState(0, theta)
    for _ in range(50):
        state, accepted, between = auto_rj_step(state, gs, space, Y4, None, AUX, rng)
        assert accepted and not between


def test_pilot_rejects_non_adjacent_jump():
    m1 = ModelSpec(1, (edges(),))
    m2 = m1.extend(triangle(), id=2)
    m3 = m2.extend(twostar(), id=3)
    space = ModelSpace((m1, m2, m3))
    with pytest.raises(ModelError, match="adjacent"):
        pilot_rj_step(RJState(0, [0.0]), space, PilotTuning.default(space), Y4, None, AUX,
                      np.random.default_rng(0), target=2)


def test_check_nested():
    m1 = ModelSpec(1, (edges(),))
    check_nested(ModelSpace((m1, m1.extend(triangle()))))
    with pytest.raises(ModelError):
        check_nested(ModelSpace((m1, ModelSpec(2, (triangle(), edges())))))


def test_pilot_jump_matrix():
    P = pilot_jump_matrix(3)
    np.testing.assert_allclose(P, [[0.5, 0.5, 0], [1 / 3, 1 / 3, 1 / 3], [0, 0.5, 0.5]])


def exact_post_probs(space, y):
    ev = np.array([grid_posterior(y, m, half_width=10, points={1: 801, 2: 201}[m.dim]).log_evidence
                   for m in space.models])
    p = np.exp(ev - ev.max())
    return p / p.sum()


@pytest.mark.parametrize("method", ["auto", "pilot"])
def test_selection_matches_exact_model_posterior(method):
    space = nested_space()
    want = exact_post_probs(space, Y4)
    kw = {"offline_cfg": offline} if method == "auto" else {"tuning": PilotTuning.default(space, 0.5, 2.0)}
    res = run_selection(method, space, Y4, None, 40_000, np.random.default_rng(3), aux_cfg=AUX, **kw)
    np.testing.assert_allclose(res.post_probs, want, atol=0.03)
    assert res.between_acceptance > 0.05


def test_duplicated_model_symmetry():
    m = ModelSpec(1, (edges(), triangle()), prior_cov=4 * np.eye(2))
    space = ModelSpace((m, ModelSpec(2, m.statistics, m.prior_mean, m.prior_cov)))
    res = run_selection("auto", space, Y4, None, 20_000, np.random.default_rng(8), aux_cfg=AUX, offline_cfg=offline)
    assert abs(res.post_probs[0] - 0.5) < 0.03


def test_single_model_has_probability_one():
    space = ModelSpace((ModelSpec(1, (edges(),)),))
    res = run_selection("auto", space, Y4, None, 200, np.random.default_rng(0), aux_cfg=AUX, offline_cfg=offline)
    assert res.post_probs.tolist() == [1.0]
    assert math.isnan(res.between_acceptance)


def test_selection_is_deterministic_and_reports_draws():
    space = nested_space()
    runs = [run_selection("pilot", space, Y4, None, 500, np.random.default_rng(1), aux_cfg=AUX) for _ in range(2)]
    np.testing.assert_array_equal(runs[0].trace, runs[1].trace)
    res = runs[0]
    assert sum(len(d) for d in res.draws) == 500
    assert [d.shape[1] for d in res.draws] == [1, 2]


def test_unvisited_model_warns():
    m1 = ModelSpec(1, (edges(),))
    space = ModelSpace((m1, m1.extend(triangle(), id=2)), between_jump=[[1.0, 0.0], [0.5, 0.5]])
    with pytest.warns(RuntimeWarning, match="never visited"):
        run_selection("auto", space, Y4, None, 50, np.random.default_rng(0), aux_cfg=AUX, offline_cfg=offline)


def test_bma_predictive():
    space = nested_space()
    res = run_selection("pilot", space, Y4, None, 2000, np.random.default_rng(2), aux_cfg=AUX)
    out = bma_predictive(space, res, 100, AUX, np.random.default_rng(3), Y4, None)
    assert out.shape == (100, 2)
    assert np.all((out[:, 0] >= 0) & (out[:, 0] <= 6))


def test_load_space_with_model_prior(tmp_path):
    p = tmp_path / "s.json"
    p.write_text('{"model_prior": [0.25, 0.75], "models": [{"id": 1, "statistics": [{"type": "edges"}]},'
                 '{"id": 2, "statistics": [{"type": "edges"}, {"type": "triangle"}]}]}')
    space = load_space(p)
    assert space.ids == [1, 2]
    np.testing.assert_allclose(space.model_prior, [0.25, 0.75])


def test_context_caches_observed_statistics():
    ctx = _Context(nested_space(), Y4, None)
    np.testing.assert_array_equal(ctx.s_obs[1], [4.0, 1.0])
