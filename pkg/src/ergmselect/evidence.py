"""Within-model evidence: path sampling for log z(theta*) plus a KDE of the posterior.

    log p(y) = theta*' s(y) - log z(theta*) + log p(theta*) - log p(theta* | y)
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import logsumexp

from .exchange import ExchangeConfig, PosteriorSample, run_exchange
from .graph import Graph
from .sampler import NetworkSimulator, SimConfig
from .stats import ModelSpec

MAX_KDE_DIM = 5


@dataclass(frozen=True)
class PathSchedule:
    """Temperature ladder t_i = (i/I)^c, i = 0..I, with draws_per_point statistics each."""

    I: int = 100
    c: float = 1.0
    draws_per_point: int = 500
    aux: SimConfig = field(default_factory=lambda: SimConfig(iterations=1000, burn_in=1000))
    n_batches: int = 10

    def __post_init__(self):
        if self.I < 2:
            raise ValueError("a path needs at least two intervals (I >= 2)")
        if not (self.c > 0 and math.isfinite(self.c)):
            raise ValueError("schedule exponent c must be positive")
        if self.draws_per_point < 1:
            raise ValueError("draws_per_point must be >= 1")

    @property
    def points(self) -> np.ndarray:
        return (np.arange(self.I + 1) / self.I) ** self.c

    def trapezoid_weights(self) -> np.ndarray:
        t = self.points
        dt = np.diff(t)
        w = np.zeros_like(t)
        w[:-1] += dt / 2
        w[1:] += dt / 2
        return w


@dataclass(frozen=True)
class PathEstimate:
    log_z: float
    se: float
    t: np.ndarray
    e_hat: np.ndarray
    e_se: np.ndarray


@dataclass(frozen=True)
class EvidenceEstimate:
    model_id: int | str
    theta_star: np.ndarray
    log_z: float
    log_kde: float
    log_prior_at_star: float
    log_q_at_star: float
    log_z_se: float = float("nan")
    path: PathEstimate | None = None
    n_posterior_draws: int = 0

    @property
    def log_evidence(self) -> float:
        return self.log_q_at_star - self.log_z + self.log_prior_at_star - self.log_kde

    def to_dict(self) -> dict:
        return {
            "model_id": self.model_id,
            "theta_star": self.theta_star.tolist(),
            "log_evidence": self.log_evidence,
            "log_z": self.log_z,
            "log_z_se": self.log_z_se,
            "log_kde": self.log_kde,
            "log_prior_at_star": self.log_prior_at_star,
            "log_q_at_star": self.log_q_at_star,
            "n_posterior_draws": self.n_posterior_draws,
        }


def _draw_matrix(draws) -> np.ndarray:
    if isinstance(draws, PosteriorSample):
        return draws.draws
    x = np.asarray(draws, dtype=float)
    return x.reshape(-1, 1) if x.ndim == 1 else x


def choose_theta_star(sample: PosteriorSample | np.ndarray) -> np.ndarray:
    x = _draw_matrix(sample)
    if x.shape[0] == 0:
        raise ValueError("cannot choose theta* from an empty sample")
    return x.mean(axis=0)


def _batch_se(values: np.ndarray, n_batches: int) -> float:
    n = values.size
    if n < 2:
        return float("nan")
    b = min(n_batches, n)
    if b < 2 or n // b < 2:
        return float(values.std(ddof=1) / math.sqrt(n))
    size = n // b
    means = values[: b * size].reshape(b, size).mean(axis=1)
    return float(means.std(ddof=1) / math.sqrt(b))


def path_sampling(theta_star, m: ModelSpec, covs, sched: PathSchedule, rng: np.random.Generator,
                  n: int) -> PathEstimate:
    """Trapezoid estimate of log z(theta*) along the straight path from 0; chains warm-start point to point."""
    theta_star = np.asarray(theta_star, dtype=float)
    sim = NetworkSimulator(m, covs, n)
    t = sched.points
    e_hat = np.zeros(t.size)
    e_se = np.zeros(t.size)
    adj = sched.aux.graph.adjacency if sched.aux.init == "given" else np.zeros((n, n), dtype=np.uint8)
    for i, ti in enumerate(t):
        rec, adj = sim.record(theta_star * ti, adj, sched.aux.burn_in, sched.aux.iterations,
                              sched.draws_per_point, rng)
        vals = rec @ theta_star
        e_hat[i] = vals.mean()
        e_se[i] = _batch_se(vals, sched.n_batches) if np.any(theta_star) else 0.0
    w = sched.trapezoid_weights()
    log_z0 = n * (n - 1) / 2 * math.log(2.0)
    se = float(np.sqrt(np.sum((w * e_se) ** 2)))
    return PathEstimate(log_z0 + float(w @ e_hat), se, t, e_hat, e_se)


def log_z_path(theta_star, m: ModelSpec, covs, sched: PathSchedule, rng: np.random.Generator, n: int) -> float:
    return path_sampling(theta_star, m, covs, sched, rng, n).log_z


def kde_log_density(draws: PosteriorSample | np.ndarray, theta_star) -> float:
    """Log of a product-Gaussian KDE at theta*, normal-reference bandwidth per coordinate."""
    x = _draw_matrix(draws)
    N, d = x.shape
    if d > MAX_KDE_DIM:
        raise ValueError(f"kernel density estimation is limited to {MAX_KDE_DIM} dimensions, got {d}")
    if N < 2:
        raise ValueError("kernel density estimation needs at least two draws")
    sd = x.std(axis=0, ddof=1)
    if np.any(sd <= 0):
        raise ValueError("zero bandwidth: posterior draws are constant in some coordinate")
    h = 1.06 * sd * N ** (-1.0 / (4 + d))
    z = (np.asarray(theta_star, dtype=float) - x) / h
    log_k = -0.5 * np.sum(z * z, axis=1) - np.sum(np.log(h)) - 0.5 * d * math.log(2 * math.pi)
    return float(logsumexp(log_k) - math.log(N))


def log_evidence(y: Graph, m: ModelSpec, covs, sched: PathSchedule, cfg: ExchangeConfig,
                 rng: np.random.Generator, *, sample: PosteriorSample | None = None) -> EvidenceEstimate:
    if m.dim > MAX_KDE_DIM:
        raise ValueError(f"evidence estimation is limited to models with <= {MAX_KDE_DIM} parameters")
    post_rng, path_rng = rng.spawn(2)
    if sample is None:
        sample = run_exchange(y, m, covs, cfg, post_rng)
    theta_star = choose_theta_star(sample)
    path = path_sampling(theta_star, m, covs, sched, path_rng, y.n)
    s_obs = NetworkSimulator(m, covs, y.n).statistics(y.adjacency)
    return EvidenceEstimate(
        model_id=m.id,
        theta_star=theta_star,
        log_z=path.log_z,
        log_kde=kde_log_density(sample, theta_star),
        log_prior_at_star=m.log_prior(theta_star),
        log_q_at_star=float(theta_star @ s_obs),
        log_z_se=path.se,
        path=path,
        n_posterior_draws=sample.draws.shape[0],
    )


def bf_from_evidence(e_h: EvidenceEstimate, e_k: EvidenceEstimate) -> float:
    return math.exp(e_h.log_evidence - e_k.log_evidence)
