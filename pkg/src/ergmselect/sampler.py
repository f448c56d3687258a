"""Approximate draws from an ERGM by Metropolis dyad toggling."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal, Mapping

import numpy as np

from . import _kernels as K
from .graph import Graph, GraphError, NodeCovariate
from .stats import CompiledModel, ModelError, ModelSpec, compile_model

InitKind = Literal["empty", "observed", "given"]


@dataclass(frozen=True)
class SimConfig:
    """Settings for one auxiliary chain.

    ``iterations`` dyad proposals are made per returned draw, after an
    initial ``burn_in``.
    """

    iterations: int = 3000
    burn_in: int = 0
    init: InitKind = "empty"
    graph: Graph | None = None

    def __post_init__(self):
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")
        if self.burn_in < 0:
            raise ValueError("burn_in must be >= 0")
        if self.init not in ("empty", "observed", "given"):
            raise ValueError(f"unknown init {self.init!r}")
        if self.init == "given" and self.graph is None:
            raise ValueError("init='given' needs a graph")


def _chain_seed(rng: np.random.Generator) -> int:
    return int(rng.integers(0, 2**31 - 1))


class NetworkSimulator:
    """Holds a model's compiled statistics for repeated chains on n nodes."""

    def __init__(self, m: ModelSpec, covs: Mapping[str, NodeCovariate] | None, n: int):
        if n < 2:
            raise GraphError("simulation needs at least two nodes")
        self.model = m
        self.n = n
        self.compiled: CompiledModel = compile_model(m, covs, n)

    def _theta(self, theta) -> np.ndarray:
        theta = np.ascontiguousarray(theta, dtype=float)
        if theta.shape != (self.model.dim,):
            raise ModelError(f"theta has shape {theta.shape}, model {self.model.id} needs ({self.model.dim},)")
        return theta

    def statistics(self, adj: np.ndarray) -> np.ndarray:
        c = self.compiled
        out = np.zeros(self.model.dim)
        K.full_stats(adj, c.codes, c.decays, c.covx, c.covcol, out)
        return out

    def run(self, theta, start: np.ndarray, n_steps: int, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray, int]:
        """Run n_steps proposals from a copy of ``start``; return (adjacency, s(final), accepted)."""
        theta = self._theta(theta)
        adj = np.array(start, dtype=np.uint8, copy=True)
        stats = self.statistics(adj)
        c = self.compiled
        acc = K.run_chain(adj, stats, theta, int(n_steps), _chain_seed(rng), c.codes, c.decays, c.covx, c.covcol)
        return adj, self.statistics(adj), int(acc)

    def record(self, theta, start: np.ndarray, burn_in: int, thin: int, n_record: int,
               rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
        """Statistics of n_record states spaced ``thin`` proposals apart; also returns the end state."""
        theta = self._theta(theta)
        adj = np.array(start, dtype=np.uint8, copy=True)
        stats = self.statistics(adj)
        rec = np.zeros((n_record, self.model.dim))
        c = self.compiled
        K.run_chain_record(adj, stats, theta, int(burn_in), int(thin), int(n_record), _chain_seed(rng),
                           c.codes, c.decays, c.covx, c.covcol, rec)
        return rec, adj


def _start_adjacency(cfg: SimConfig, observed: Graph | None, n: int | None) -> np.ndarray:
    if cfg.init == "given":
        return cfg.graph.adjacency
    if cfg.init == "observed":
        if observed is None:
            raise ValueError("init='observed' needs the observed graph")
        return observed.adjacency
    if n is None:
        if observed is None:
            raise ValueError("node count unknown: pass n or an observed graph")
        n = observed.n
    return np.zeros((n, n), dtype=np.uint8)


def simulate_network(theta, m: ModelSpec, covs, cfg: SimConfig, rng: np.random.Generator,
                     *, observed: Graph | None = None, n: int | None = None) -> Graph:
    start = _start_adjacency(cfg, observed, n)
    sim = NetworkSimulator(m, covs, start.shape[0])
    adj, _, _ = sim.run(theta, start, cfg.burn_in + cfg.iterations, rng)
    return Graph(adj, _trusted=True)


def sample_statistics(theta, m: ModelSpec, covs, n_draws: int, cfg: SimConfig, rng: np.random.Generator,
                      *, observed: Graph | None = None, n: int | None = None) -> np.ndarray:
    """s(y) for n_draws successive draws of one chain thinned by cfg.iterations."""
    if n_draws < 1:
        raise ValueError("n_draws must be >= 1")
    start = _start_adjacency(cfg, observed, n)
    sim = NetworkSimulator(m, covs, start.shape[0])
    rec, _ = sim.record(theta, start, cfg.burn_in, cfg.iterations, n_draws, rng)
    return rec


def expected_stats(theta, m: ModelSpec, covs, n_draws: int, cfg: SimConfig, rng: np.random.Generator,
                   *, observed: Graph | None = None, n: int | None = None) -> np.ndarray:
    return sample_statistics(theta, m, covs, n_draws, cfg, rng, observed=observed, n=n).mean(axis=0)
