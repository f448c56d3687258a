"""Across-model sampling: reversible jump exchange moves over a finite model list."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Literal, Sequence

import numpy as np

from .exchange import (ExchangeConfig, GaussianSummary, PosteriorSample, mple_start, run_exchange,
                       summarize)
from .graph import Graph
from .sampler import NetworkSimulator, SimConfig
from .stats import ModelError, ModelSpec, Statistic

Method = Literal["auto", "pilot"]


@dataclass(frozen=True, eq=False)
class ModelSpace:
    models: tuple[ModelSpec, ...]
    model_prior: np.ndarray | None = None
    between_jump: np.ndarray | None = None

    def __post_init__(self):
        models = tuple(self.models)
        if not models:
            raise ModelError("model space is empty")
        H = len(models)
        prior = np.full(H, 1.0 / H) if self.model_prior is None else np.asarray(self.model_prior, dtype=float)
        jump = np.full((H, H), 1.0 / H) if self.between_jump is None else np.asarray(self.between_jump, dtype=float)
        if prior.shape != (H,) or np.any(prior < 0) or not math.isclose(prior.sum(), 1.0, abs_tol=1e-9):
            raise ModelError("model prior must be a probability vector over the models")
        if jump.shape != (H, H) or np.any(jump < 0) or not np.allclose(jump.sum(axis=1), 1.0, atol=1e-9):
            raise ModelError("between-model proposal rows must be probability vectors")
        object.__setattr__(self, "models", models)
        object.__setattr__(self, "model_prior", prior)
        object.__setattr__(self, "between_jump", jump)

    def __len__(self) -> int:
        return len(self.models)

    @property
    def ids(self) -> list:
        return [m.id for m in self.models]


@dataclass(frozen=True)
class RJState:
    k: int
    theta: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "theta", np.asarray(self.theta, dtype=float))


@dataclass(frozen=True, eq=False)
class ModelSelectionResult:
    method: str
    model_ids: tuple
    visit_counts: np.ndarray
    post_probs: np.ndarray
    bayes_factors: np.ndarray
    within_acceptance: np.ndarray
    between_acceptance: float
    draws: tuple[np.ndarray, ...]
    trace: np.ndarray
    model_prior: np.ndarray
    offline: tuple[PosteriorSample, ...] = ()
    summaries: tuple[GaussianSummary, ...] = ()


KASS_RAFTERY = ((3.0, "Not worth more than a bare mention"), (20.0, "Positive"),
                (150.0, "Strong"), (math.inf, "Very strong"))


def kass_raftery(bf: float) -> str:
    """Verbal strength of evidence in favour of the numerator model."""
    if math.isnan(bf):
        return "undefined"
    if bf < 1.0:
        return "favours the denominator model"
    for bound, label in KASS_RAFTERY:
        if bf < bound:
            return label
    return KASS_RAFTERY[-1][1]


def bayes_factor_matrix(counts, model_prior) -> np.ndarray:
    """BF[h, k] = posterior odds / prior odds; inf where only k is unvisited, nan where both are."""
    counts = np.asarray(counts, dtype=float)
    prior = np.asarray(model_prior, dtype=float)
    H = counts.size
    bf = np.empty((H, H))
    with np.errstate(divide="ignore", invalid="ignore"):
        for h in range(H):
            for k in range(H):
                bf[h, k] = (counts[h] / counts[k]) * (prior[k] / prior[h])
    np.fill_diagonal(bf, 1.0)
    return bf


def bayes_factors(result: ModelSelectionResult, space: ModelSpace | None = None) -> np.ndarray:
    prior = result.model_prior if space is None else space.model_prior
    return bayes_factor_matrix(result.visit_counts, prior)


def rj_log_ratio(theta_cur, theta_prop, s_cur_obs, s_cur_aux, s_prop_obs, s_prop_aux,
                 log_prior_cur: float, log_prior_prop: float, log_proposal_ratio: float = 0.0) -> float:
    """Log acceptance ratio of a (possibly trans-dimensional) exchange move.

    Only unnormalised likelihoods appear: theta_cur is scored under the current
    model's statistics, theta_prop under the proposed model's. The prior terms
    include the model prior; the proposal term is log h(reverse) - log h(forward).
    """
    cur = float(np.dot(theta_cur, np.asarray(s_cur_aux) - np.asarray(s_cur_obs)))
    prop = float(np.dot(theta_prop, np.asarray(s_prop_obs) - np.asarray(s_prop_aux)))
    return cur + prop + log_prior_prop - log_prior_cur + log_proposal_ratio


def _accept(log_ratio: float, rng: np.random.Generator) -> bool:
    return log_ratio >= 0.0 or rng.random() < math.exp(log_ratio)


class _Context:
    """Per-run cache of simulators and observed statistics for every model."""

    def __init__(self, space: ModelSpace, y: Graph, covs):
        self.space = space
        self.y = y
        self.sims = [NetworkSimulator(m, covs, y.n) for m in space.models]
        self.s_obs = [sim.statistics(y.adjacency) for sim in self.sims]
        self.log_model_prior = np.log(space.model_prior)

    def log_post_prior(self, k: int, theta) -> float:
        return self.space.models[k].log_prior(theta) + self.log_model_prior[k]

    def aux_draw(self, h: int, theta, aux_cfg: SimConfig, rng) -> np.ndarray:
        start = aux_cfg.graph.adjacency if aux_cfg.init == "given" else (
            self.y.adjacency if aux_cfg.init == "observed" else np.zeros_like(self.y.adjacency))
        adj, _, _ = self.sims[h].run(theta, start, aux_cfg.burn_in + aux_cfg.iterations, rng)
        return adj


def _offline_config(cfg, m: ModelSpec) -> ExchangeConfig:
    return cfg(m) if callable(cfg) else cfg


def auto_rj_offline_samples(space: ModelSpace, y: Graph, covs,
                            cfg: ExchangeConfig | Callable[[ModelSpec], ExchangeConfig],
                            rng: np.random.Generator) -> list[PosteriorSample]:
    """Exchange posterior sample per model; each model gets its own child stream."""
    streams = rng.spawn(len(space))
    return [run_exchange(y, m, covs, _offline_config(cfg, m), r) for m, r in zip(space.models, streams)]


def auto_rj_offline(space: ModelSpace, y: Graph, covs,
                    cfg: ExchangeConfig | Callable[[ModelSpec], ExchangeConfig],
                    rng: np.random.Generator) -> list[GaussianSummary]:
    return [summarize(s) for s in auto_rj_offline_samples(space, y, covs, cfg, rng)]


def auto_rj_step(state: RJState, summaries: Sequence[GaussianSummary], space: ModelSpace, y: Graph, covs,
                 aux_cfg: SimConfig, rng: np.random.Generator, *, _ctx: _Context | None = None,
                 ) -> tuple[RJState, bool, bool]:
    """Independence-sampler jump: m' from the jump row, theta' from that model's Gaussian summary."""
    if len(summaries) != len(space):
        raise ModelError(f"{len(summaries)} summaries for {len(space)} models")
    ctx = _ctx or _Context(space, y, covs)
    k = state.k
    h = int(rng.choice(len(space), p=space.between_jump[k]))
    w_h = summaries[h]
    if w_h.dim != space.models[h].dim:
        raise ModelError(f"summary for model {space.models[h].id} has the wrong dimension")
    theta_prop = w_h.sample(rng)
    adj_aux = ctx.aux_draw(h, theta_prop, aux_cfg, rng)
    log_q = (summaries[k].logpdf(state.theta) - w_h.logpdf(theta_prop)
             + math.log(space.between_jump[h, k]) - math.log(space.between_jump[k, h]))
    log_r = rj_log_ratio(state.theta, theta_prop,
                         ctx.s_obs[k], ctx.sims[k].statistics(adj_aux),
                         ctx.s_obs[h], ctx.sims[h].statistics(adj_aux),
                         ctx.log_post_prior(k, state.theta), ctx.log_post_prior(h, theta_prop), log_q)
    if _accept(log_r, rng):
        return RJState(h, theta_prop), True, h != k
    return state, False, h != k


@dataclass(frozen=True)
class PilotTuning:
    """Random-walk scales per model and Gaussian birth densities for appended coordinates.

    ``birth[k]`` is the (mean, sd) of the density proposing the new coordinate
    when jumping from model k-1 up to model k; ``birth[0]`` is unused.
    """

    within_scales: tuple[np.ndarray, ...]
    birth: tuple[tuple[float, float], ...]

    @classmethod
    def default(cls, space: ModelSpace, within_scale: float = 0.1, birth_sd: float = 5.0) -> "PilotTuning":
        return cls(tuple(np.full(m.dim, within_scale) for m in space.models),
                   tuple((0.0, birth_sd) for _ in space.models))

    def log_birth(self, k: int, u: float) -> float:
        mu, sd = self.birth[k]
        return -0.5 * ((u - mu) / sd) ** 2 - math.log(sd) - 0.5 * math.log(2 * math.pi)


def check_nested(space: ModelSpace) -> None:
    for a, b in zip(space.models, space.models[1:]):
        if b.dim != a.dim + 1 or b.statistics[:-1] != a.statistics:
            raise ModelError(f"model {b.id} must be model {a.id} with exactly one statistic appended")


def pilot_jump_matrix(H: int) -> np.ndarray:
    """Uniform over the current model and its immediate neighbours."""
    P = np.zeros((H, H))
    for k in range(H):
        nb = [j for j in (k - 1, k, k + 1) if 0 <= j < H]
        P[k, nb] = 1.0 / len(nb)
    return P


def pilot_rj_step(state: RJState, space: ModelSpace, tuned: PilotTuning, y: Graph, covs, aux_cfg: SimConfig,
                  rng: np.random.Generator, *, target: int | None = None, _ctx: _Context | None = None,
                  ) -> tuple[RJState, bool, bool]:
    """Birth/death or random-walk move between nested neighbouring models."""
    ctx = _ctx or _Context(space, y, covs)
    H = len(space)
    k = state.k
    jump = pilot_jump_matrix(H)
    h = int(rng.choice(H, p=jump[k])) if target is None else int(target)
    if not 0 <= h < H or abs(h - k) > 1:
        raise ModelError(f"pilot-tuned moves only reach adjacent models; {k} -> {h} requested")
    theta = state.theta
    if h == k:
        theta_prop = theta + tuned.within_scales[k] * rng.standard_normal(theta.size)
        log_q = 0.0
    elif h == k + 1:
        mu, sd = tuned.birth[h]
        u = mu + sd * rng.standard_normal()
        theta_prop = np.append(theta, u)
        log_q = -tuned.log_birth(h, u)
    else:
        theta_prop = theta[:-1].copy()
        log_q = tuned.log_birth(k, theta[-1])
    log_q += math.log(jump[h, k]) - math.log(jump[k, h])
    adj_aux = ctx.aux_draw(h, theta_prop, aux_cfg, rng)
    log_r = rj_log_ratio(theta, theta_prop,
                         ctx.s_obs[k], ctx.sims[k].statistics(adj_aux),
                         ctx.s_obs[h], ctx.sims[h].statistics(adj_aux),
                         ctx.log_post_prior(k, theta), ctx.log_post_prior(h, theta_prop), log_q)
    if _accept(log_r, rng):
        return RJState(h, theta_prop), True, h != k
    return state, False, h != k


def run_selection(method: Method, space: ModelSpace, y: Graph, covs, iterations: int, rng: np.random.Generator,
                  *, aux_cfg: SimConfig | None = None,
                  offline_cfg: ExchangeConfig | Callable[[ModelSpec], ExchangeConfig] | None = None,
                  tuning: PilotTuning | None = None, summaries: Sequence[GaussianSummary] | None = None,
                  init: RJState | None = None, progress: Callable[[int], None] | None = None,
                  ) -> ModelSelectionResult:
    if iterations < 1:
        raise ValueError("iterations must be >= 1")
    if method not in ("auto", "pilot"):
        raise ValueError(f"unknown method {method!r}")
    aux_cfg = aux_cfg or SimConfig(iterations=3000, init="observed")
    offline_rng, online_rng = rng.spawn(2)
    ctx = _Context(space, y, covs)
    H = len(space)
    offline: list[PosteriorSample] = []
    if method == "auto":
        if summaries is None:
            if offline_cfg is None:
                offline_cfg = lambda m: ExchangeConfig.per_dimension(m.dim, aux=aux_cfg)  # noqa: E731
            offline = auto_rj_offline_samples(space, y, covs, offline_cfg, offline_rng)
            summaries = [summarize(s) for s in offline]
        state = init or RJState(0, summaries[0].mean.copy())
    else:
        check_nested(space)
        tuning = tuning or PilotTuning.default(space)
        state = init or RJState(0, mple_start(y, space.models[0], covs))
    if state.theta.shape != (space.models[state.k].dim,):
        raise ModelError("initial theta does not match the initial model")

    trace = np.empty(iterations, dtype=np.int64)
    draws: list[list[np.ndarray]] = [[] for _ in range(H)]
    within_try = np.zeros(H)
    within_acc = np.zeros(H)
    between_try = between_acc = 0
    for t in range(iterations):
        if method == "auto":
            new, accepted, between = auto_rj_step(state, summaries, space, y, covs, aux_cfg, online_rng, _ctx=ctx)
        else:
            new, accepted, between = pilot_rj_step(state, space, tuning, y, covs, aux_cfg, online_rng, _ctx=ctx)
        if between:
            between_try += 1
            between_acc += accepted
        else:
            within_try[state.k] += 1
            within_acc[state.k] += accepted
        state = new
        trace[t] = state.k
        draws[state.k].append(state.theta)
        if progress is not None:
            progress(t)

    counts = np.bincount(trace, minlength=H).astype(float)
    for k in np.flatnonzero(counts == 0):
        warnings.warn(f"model {space.models[k].id} was never visited; its probability is reported as 0",
                      RuntimeWarning, stacklevel=2)
    with np.errstate(invalid="ignore"):
        within_rate = np.where(within_try > 0, within_acc / np.maximum(within_try, 1), np.nan)
    return ModelSelectionResult(
        method=method,
        model_ids=tuple(space.ids),
        visit_counts=counts,
        post_probs=counts / counts.sum(),
        bayes_factors=bayes_factor_matrix(counts, space.model_prior),
        within_acceptance=within_rate,
        between_acceptance=between_acc / between_try if between_try else float("nan"),
        draws=tuple(np.array(d).reshape(-1, space.models[k].dim) for k, d in enumerate(draws)),
        trace=trace,
        model_prior=space.model_prior.copy(),
        offline=tuple(offline),
        summaries=tuple(summaries) if summaries is not None else (),
    )


def reference_statistics(space: ModelSpace) -> ModelSpec:
    """Ordered union of every statistic used in the space (identity prior, unused)."""
    seen: list[Statistic] = []
    for m in space.models:
        for s in m.statistics:
            if s not in seen:
                seen.append(s)
    return ModelSpec("reference", tuple(seen))


def bma_predictive(space: ModelSpace, result: ModelSelectionResult, n_draws: int, aux_cfg: SimConfig,
                   rng: np.random.Generator, y: Graph, covs, reference: ModelSpec | None = None) -> np.ndarray:
    """Statistics of networks drawn from the model-averaged posterior predictive."""
    if n_draws < 1:
        raise ValueError("n_draws must be >= 1")
    reference = reference or reference_statistics(space)
    visited = [k for k in range(len(space)) if result.post_probs[k] > 0]
    for k in visited:
        if len(result.draws[k]) == 0:
            raise ValueError(f"no retained draws for visited model {space.models[k].id}")
    ctx = _Context(space, y, covs)
    ref_sim = NetworkSimulator(reference, covs, y.n)
    out = np.empty((n_draws, reference.dim))
    for r in range(n_draws):
        k = int(rng.choice(len(space), p=result.post_probs))
        draws = result.draws[k]
        theta = draws[rng.integers(len(draws))]
        out[r] = ref_sim.statistics(ctx.aux_draw(k, theta, aux_cfg, rng))
    return out


def load_space(path) -> ModelSpace:
    """Model space from a JSON config; an optional top-level ``model_prior`` overrides uniform."""
    import json
    from pathlib import Path

    from .stats import load_models

    models = load_models(path)
    data = json.loads(Path(path).read_text())
    prior = data.get("model_prior") if isinstance(data, dict) else None
    return ModelSpace(tuple(models), None if prior is None else np.asarray(prior, dtype=float))
