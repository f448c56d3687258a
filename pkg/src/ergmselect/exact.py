"""Exact answers on tiny graphs (n <= 5) by enumerating every labelled graph.

Used as oracles for the samplers: log z(theta) is a log-sum over the
distinct statistic vectors, and low-dimensional posteriors are handled by
grid quadrature.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from .graph import Graph, enumerate_graphs
from .stats import ModelSpec, compute_statistics


@dataclass(frozen=True)
class StatTable:
    """Distinct statistic vectors over all graphs on n nodes and their multiplicities."""

    stats: np.ndarray
    log_counts: np.ndarray

    def log_z(self, theta) -> np.ndarray:
        """log z for one theta (shape (d,)) or a stack of them (shape (..., d))."""
        theta = np.asarray(theta, dtype=float)
        return logsumexp(theta @ self.stats.T + self.log_counts, axis=-1)

    def probabilities(self, theta) -> np.ndarray:
        lw = np.asarray(theta, dtype=float) @ self.stats.T + self.log_counts
        return np.exp(lw - logsumexp(lw))


def stat_table(m: ModelSpec, n: int, covs=None) -> StatTable:
    rows: dict[tuple, int] = {}
    for g in enumerate_graphs(n):
        key = tuple(compute_statistics(g, covs, m))
        rows[key] = rows.get(key, 0) + 1
    keys = sorted(rows)
    return StatTable(np.array(keys, dtype=float).reshape(len(keys), m.dim),
                     np.log(np.array([rows[k] for k in keys], dtype=float)))


def exact_log_z(theta, m: ModelSpec, n: int, covs=None) -> float:
    return float(stat_table(m, n, covs).log_z(theta))


@dataclass(frozen=True)
class GridPosterior:
    """Posterior on a rectangular grid; ``axes[j]`` are the grid points of coordinate j."""

    axes: tuple[np.ndarray, ...]
    log_density: np.ndarray  # unnormalised, shape = grid shape
    log_evidence: float

    def marginal(self, j: int) -> tuple[np.ndarray, np.ndarray]:
        """Grid points and normalised marginal density of coordinate j."""
        other = tuple(a for a in range(len(self.axes)) if a != j)
        lm = logsumexp(self.log_density, axis=other) if other else self.log_density
        lm = lm + sum(math.log(self.axes[a][1] - self.axes[a][0]) for a in other)
        dens = np.exp(lm - lm.max())
        dens /= np.trapezoid(dens, self.axes[j])
        return self.axes[j], dens

    def marginal_cdf(self, j: int):
        x, dens = self.marginal(j)
        cdf = np.concatenate([[0.0], np.cumsum((dens[1:] + dens[:-1]) / 2 * np.diff(x))])
        cdf /= cdf[-1]
        return lambda v: np.interp(v, x, cdf)

    def mean(self) -> np.ndarray:
        out = []
        for j in range(len(self.axes)):
            x, dens = self.marginal(j)
            out.append(np.trapezoid(x * dens, x))
        return np.array(out)


def grid_posterior(y: Graph, m: ModelSpec, covs=None, *, half_width: float = 8.0, points: int = 121,
                   centre=None) -> GridPosterior:
    """Quadrature of exp(theta's(y) - log z(theta)) p(theta) on a box around ``centre`` (default 0)."""
    table = stat_table(m, y.n, covs)
    s_obs = compute_statistics(y, covs, m)
    centre = np.zeros(m.dim) if centre is None else np.asarray(centre, dtype=float)
    axes = tuple(np.linspace(c - half_width, c + half_width, points) for c in centre)
    mesh = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)
    flat = mesh.reshape(-1, m.dim)
    diff = flat - m.prior_mean
    prior_prec = np.linalg.inv(m.prior_cov)
    _, logdet = np.linalg.slogdet(m.prior_cov)
    log_prior = -0.5 * np.einsum("ij,jk,ik->i", diff, prior_prec, diff) - 0.5 * logdet - 0.5 * m.dim * math.log(2 * math.pi)
    log_post = flat @ s_obs - table.log_z(flat) + log_prior
    cell = float(np.prod([a[1] - a[0] for a in axes]))
    # trapezoid weights on the box; the density is negligible at its faces when the box is wide enough
    w = np.ones(flat.shape[0])
    for idx in np.unravel_index(np.arange(flat.shape[0]), mesh.shape[:-1]):
        w = w * np.where((idx == 0) | (idx == points - 1), 0.5, 1.0)
    log_ev = float(logsumexp(log_post, b=w) + math.log(cell))
    return GridPosterior(axes, log_post.reshape(mesh.shape[:-1]), log_ev)

