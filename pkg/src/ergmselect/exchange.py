"""Within-model posterior sampling with the exchange algorithm.

The intractable normalising constant never has to be evaluated: each
proposal simulates an auxiliary network at the proposed parameter and the
two normalising constants cancel in the acceptance ratio.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Literal

import numpy as np
from scipy import optimize

from .graph import Graph
from .sampler import NetworkSimulator, SimConfig
from .stats import ModelError, ModelSpec

RIDGE = 1e-6


@dataclass(frozen=True)
class ExchangeConfig:
    """``main_iterations`` counts every step; the first ``burn_in`` are discarded."""

    main_iterations: int = 1100
    burn_in: int = 100
    proposal_scale: float | tuple[float, ...] = 0.1
    aux: SimConfig = field(default_factory=lambda: SimConfig(iterations=3000, init="observed"))
    adapt: bool = True
    target_accept: float = 0.25
    accept_band: tuple[float, float] = (0.15, 0.5)
    init: Literal["mple", "zero"] = "mple"

    def __post_init__(self):
        if self.burn_in < 0:
            raise ValueError("burn_in must be >= 0")
        if self.main_iterations - self.burn_in < 1:
            raise ValueError(f"no retained iterations: main_iterations={self.main_iterations}, burn_in={self.burn_in}")
        if np.any(np.asarray(self.proposal_scale, dtype=float) < 0):
            raise ValueError("proposal_scale must be non-negative")

    @classmethod
    def per_dimension(cls, dim: int, retained_per_dim: int = 1000, burn_per_dim: int = 100, **kw) -> "ExchangeConfig":
        """Run length scaled by model dimension (retained and burn-in both x dim)."""
        return cls(main_iterations=(retained_per_dim + burn_per_dim) * dim, burn_in=burn_per_dim * dim, **kw)


@dataclass(frozen=True)
class PosteriorSample:
    model_id: int | str
    draws: np.ndarray
    acceptance_rate: float
    labels: tuple[str, ...] = ()
    proposal_cov: np.ndarray | None = None

    def __post_init__(self):
        draws = np.atleast_2d(np.asarray(self.draws, dtype=float))
        if not np.all(np.isfinite(draws)):
            raise ValueError("posterior draws must be finite")
        if not 0.0 <= self.acceptance_rate <= 1.0:
            raise ValueError("acceptance_rate must lie in [0, 1]")
        draws.setflags(write=False)
        object.__setattr__(self, "draws", draws)

    @property
    def dim(self) -> int:
        return self.draws.shape[1]

    def means(self) -> np.ndarray:
        return self.draws.mean(axis=0)

    def sds(self) -> np.ndarray:
        return self.draws.std(axis=0, ddof=1) if len(self.draws) > 1 else np.zeros(self.dim)


@dataclass(frozen=True)
class GaussianSummary:
    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        mean = np.asarray(self.mean, dtype=float).reshape(-1)
        cov = np.atleast_2d(np.asarray(self.cov, dtype=float))
        if cov.shape != (mean.size, mean.size) or not np.allclose(cov, cov.T):
            raise ValueError("covariance must be a symmetric matrix matching the mean")
        try:
            chol = np.linalg.cholesky(cov)
        except np.linalg.LinAlgError as exc:
            raise ValueError("summary covariance is not positive definite") from exc
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)
        object.__setattr__(self, "_chol", chol)
        object.__setattr__(self, "_logdet", 2.0 * float(np.log(np.diag(chol)).sum()))

    @property
    def dim(self) -> int:
        return self.mean.size

    def logpdf(self, theta) -> float:
        z = np.linalg.solve(self._chol, np.asarray(theta, dtype=float) - self.mean)
        return float(-0.5 * z @ z - 0.5 * self._logdet - 0.5 * self.dim * math.log(2 * math.pi))

    def sample(self, rng: np.random.Generator) -> np.ndarray:
        return self.mean + self._chol @ rng.standard_normal(self.dim)


def summarize(sample: PosteriorSample, ridge: float = RIDGE) -> GaussianSummary:
    draws = sample.draws
    if draws.shape[0] < draws.shape[1] + 1:
        raise ValueError(f"need at least {draws.shape[1] + 1} draws to summarise, got {draws.shape[0]}")
    cov = np.atleast_2d(np.cov(draws, rowvar=False, ddof=1))
    return GaussianSummary(draws.mean(axis=0), cov + ridge * np.eye(draws.shape[1]))


def exchange_log_ratio(theta, theta_prop, s_obs, s_aux, log_prior_cur: float, log_prior_prop: float) -> float:
    """log of q_theta(y')/q_theta(y) * q_theta'(y)/q_theta'(y') * p(theta')/p(theta)."""
    diff = np.asarray(theta, dtype=float) - np.asarray(theta_prop, dtype=float)
    return float(diff @ (np.asarray(s_aux) - np.asarray(s_obs))) + log_prior_prop - log_prior_cur


def _accept(log_ratio: float, rng: np.random.Generator) -> bool:
    return log_ratio >= 0.0 or rng.random() < math.exp(log_ratio)


def _proposal_chol(cfg: ExchangeConfig, dim: int) -> np.ndarray:
    scale = np.broadcast_to(np.asarray(cfg.proposal_scale, dtype=float), (dim,))
    return np.diag(scale)


def exchange_step(theta, y: Graph, m: ModelSpec, covs, cfg: ExchangeConfig, rng: np.random.Generator,
                  *, proposal_chol: np.ndarray | None = None, simulator: NetworkSimulator | None = None,
                  s_obs: np.ndarray | None = None) -> tuple[np.ndarray, bool]:
    """One exchange update: propose, simulate y' at the proposal, accept or keep theta."""
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (m.dim,):
        raise ModelError(f"theta has shape {theta.shape}, model {m.id} needs ({m.dim},)")
    sim = simulator or NetworkSimulator(m, covs, y.n)
    if s_obs is None:
        s_obs = sim.statistics(y.adjacency)
    chol = _proposal_chol(cfg, m.dim) if proposal_chol is None else proposal_chol
    theta_prop = theta + chol @ rng.standard_normal(m.dim)
    lp_prop = m.log_prior(theta_prop)
    lp_cur = m.log_prior(theta)
    if not (math.isfinite(lp_prop) and math.isfinite(lp_cur)):
        raise ModelError("prior density is not finite at the current or proposed parameter")
    start = cfg.aux.graph.adjacency if cfg.aux.init == "given" else (
        y.adjacency if cfg.aux.init == "observed" else np.zeros_like(y.adjacency))
    _, s_aux, _ = sim.run(theta_prop, start, cfg.aux.burn_in + cfg.aux.iterations, rng)
    if _accept(exchange_log_ratio(theta, theta_prop, s_obs, s_aux, lp_cur, lp_prop), rng):
        return theta_prop, True
    return theta, False


def mple_start(y: Graph, m: ModelSpec, covs) -> np.ndarray:
    """Maximum pseudo-likelihood point, regularised by the prior; used only to start chains."""
    from .stats import compile_model
    from . import _kernels as K

    cm = compile_model(m, covs, y.n)
    adj = y.adjacency.copy()
    deg = y.degrees()
    rows, obs = [], []
    delta = np.zeros(m.dim)
    for i in range(y.n):
        for j in range(i + 1, y.n):
            present = adj[i, j]
            if present:
                adj[i, j] = adj[j, i] = 0
                deg[i] -= 1
                deg[j] -= 1
            K.change_add(adj, deg, i, j, cm.codes, cm.decays, cm.covx, cm.covcol, delta)
            rows.append(delta.copy())
            obs.append(float(present))
            if present:
                adj[i, j] = adj[j, i] = 1
                deg[i] += 1
                deg[j] += 1
    X = np.array(rows)
    t = np.array(obs)

    def negpost(theta):
        eta = X @ theta
        ll = float(t @ eta - np.logaddexp(0.0, eta).sum())
        grad_ll = X.T @ (t - 1.0 / (1.0 + np.exp(-eta)))
        prec = np.linalg.inv(m.prior_cov)
        r = theta - m.prior_mean
        return -(ll - 0.5 * r @ prec @ r), -(grad_ll - prec @ r)

    res = optimize.minimize(negpost, np.zeros(m.dim), jac=True, method="L-BFGS-B")
    return np.asarray(res.x, dtype=float)


def run_exchange(y: Graph, m: ModelSpec, covs, cfg: ExchangeConfig, rng: np.random.Generator,
                 theta0=None) -> PosteriorSample:
    """Exchange chain; the proposal adapts during burn-in only and is frozen afterwards."""
    d = m.dim
    sim = NetworkSimulator(m, covs, y.n)
    s_obs = sim.statistics(y.adjacency)
    if theta0 is None:
        theta = mple_start(y, m, covs) if cfg.init == "mple" else np.zeros(d)
    else:
        theta = np.asarray(theta0, dtype=float).copy()
    base = _proposal_chol(cfg, d)
    log_lambda = 0.0
    shape_chol = base
    burn_draws = []
    retained = np.empty((cfg.main_iterations - cfg.burn_in, d))
    n_acc = 0
    for t in range(cfg.main_iterations):
        chol = math.exp(log_lambda) * shape_chol
        theta, accepted = exchange_step(theta, y, m, covs, cfg, rng, proposal_chol=chol,
                                        simulator=sim, s_obs=s_obs)
        if t < cfg.burn_in:
            if cfg.adapt:
                log_lambda += (float(accepted) - cfg.target_accept) / (t + 1) ** 0.6
                burn_draws.append(theta)
                # reshape to the empirical covariance once enough burn-in draws exist
                if (t + 1) % 50 == 0 and len(burn_draws) >= max(10 * d, 50):
                    window = np.array(burn_draws[len(burn_draws) // 2:])
                    if len(np.unique(window, axis=0)) < 5 * d:
                        continue
                    emp = np.cov(window, rowvar=False).reshape(d, d)
                    emp = (2.38 ** 2 / d) * emp + RIDGE * np.eye(d)
                    try:
                        new_shape = np.linalg.cholesky(emp)
                    except np.linalg.LinAlgError:
                        continue
                    if np.all(np.diag(new_shape) > 1e-8):
                        shape_chol = new_shape
                        log_lambda = 0.0
        else:
            retained[t - cfg.burn_in] = theta
            n_acc += accepted
    rate = n_acc / retained.shape[0]
    lo, hi = cfg.accept_band
    if cfg.adapt and not lo <= rate <= hi:
        warnings.warn(f"model {m.id}: exchange acceptance rate {rate:.3f} outside [{lo}, {hi}]; "
                      "consider a longer burn-in", RuntimeWarning, stacklevel=2)
    final_chol = math.exp(log_lambda) * shape_chol
    return PosteriorSample(m.id, retained, rate, tuple(m.labels), final_chol @ final_chol.T)
