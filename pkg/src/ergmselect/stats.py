"""Sufficient statistics, change statistics and model specifications."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import IntEnum
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from . import _kernels as K
from .graph import Graph, NodeCovariate

DEFAULT_PRIOR_VAR = 100.0


class StatKind(IntEnum):
    EDGES = K.EDGES
    TWOSTAR = K.TWOSTAR
    THREESTAR = K.THREESTAR
    TRIANGLE = K.TRIANGLE
    FOURCYCLE = K.FOURCYCLE
    GWD = K.GWD
    GWESP = K.GWESP
    COVMAIN = K.COVMAIN
    COVHOMOPHILY = K.COVHOMOPHILY


_CONFIG_NAMES = {
    "edges": StatKind.EDGES,
    "twostar": StatKind.TWOSTAR,
    "kstar2": StatKind.TWOSTAR,
    "threestar": StatKind.THREESTAR,
    "kstar3": StatKind.THREESTAR,
    "triangle": StatKind.TRIANGLE,
    "triangles": StatKind.TRIANGLE,
    "fourcycle": StatKind.FOURCYCLE,
    "cycle4": StatKind.FOURCYCLE,
    "4-cycle": StatKind.FOURCYCLE,
    "gwd": StatKind.GWD,
    "gwdegree": StatKind.GWD,
    "gwesp": StatKind.GWESP,
    "covmain": StatKind.COVMAIN,
    "nodecov": StatKind.COVMAIN,
    "covhomophily": StatKind.COVHOMOPHILY,
    "nodematch": StatKind.COVHOMOPHILY,
}

_DECAYED = (StatKind.GWD, StatKind.GWESP)
_COVARIATE = (StatKind.COVMAIN, StatKind.COVHOMOPHILY)


class ModelError(ValueError):
    pass


@dataclass(frozen=True)
class Statistic:
    """One network statistic; decay and covariate are set only where the kind needs them."""

    kind: StatKind
    decay: float | None = None
    covariate: str | None = None

    def __post_init__(self):
        kind = StatKind(self.kind)
        object.__setattr__(self, "kind", kind)
        if kind in _DECAYED:
            if self.decay is None or not math.isfinite(self.decay) or self.decay <= 0:
                raise ModelError(f"{kind.name.lower()} needs a finite positive decay, got {self.decay}")
        elif self.decay is not None:
            raise ModelError(f"{kind.name.lower()} takes no decay parameter")
        if kind in _COVARIATE:
            if not self.covariate:
                raise ModelError(f"{kind.name.lower()} needs a covariate name")
        elif self.covariate is not None:
            raise ModelError(f"{kind.name.lower()} takes no covariate")

    @property
    def label(self) -> str:
        name = self.kind.name.lower()
        if self.decay is not None:
            return f"{name}({self.decay:.4g})"
        if self.covariate is not None:
            return f"{name}.{self.covariate}"
        return name

    def to_dict(self) -> dict:
        d = {"type": self.kind.name.lower()}
        if self.decay is not None:
            d["decay"] = self.decay
        if self.covariate is not None:
            d["covariate"] = self.covariate
        return d

    @classmethod
    def from_dict(cls, d: Mapping) -> "Statistic":
        try:
            kind = _CONFIG_NAMES[str(d["type"]).lower()]
        except KeyError as exc:
            raise ModelError(f"unknown statistic {d.get('type')!r}") from exc
        decay = d.get("decay")
        if isinstance(decay, str):
            decay = _parse_decay(decay)
        if decay is None and kind in _DECAYED:
            decay = math.log(2)
        return cls(kind, None if decay is None else float(decay), d.get("covariate"))


def _parse_decay(text: str) -> float:
    t = text.strip().lower().replace(" ", "")
    if t.startswith("log(") and t.endswith(")"):
        return math.log(float(t[4:-1]))
    return float(t)


def edges() -> Statistic:
    return Statistic(StatKind.EDGES)


def twostar() -> Statistic:
    return Statistic(StatKind.TWOSTAR)


def threestar() -> Statistic:
    return Statistic(StatKind.THREESTAR)


def triangle() -> Statistic:
    return Statistic(StatKind.TRIANGLE)


def fourcycle() -> Statistic:
    return Statistic(StatKind.FOURCYCLE)


def gwd(decay: float = math.log(2)) -> Statistic:
    return Statistic(StatKind.GWD, decay=decay)


def gwesp(decay: float = math.log(2)) -> Statistic:
    return Statistic(StatKind.GWESP, decay=decay)


def cov_main(name: str) -> Statistic:
    return Statistic(StatKind.COVMAIN, covariate=name)


def cov_homophily(name: str) -> Statistic:
    return Statistic(StatKind.COVHOMOPHILY, covariate=name)


@dataclass(frozen=True, eq=False)
class ModelSpec:
    """An ordered list of statistics plus a Gaussian prior on their parameters."""

    id: int | str
    statistics: tuple[Statistic, ...]
    prior_mean: np.ndarray = None
    prior_cov: np.ndarray = None
    _prior_chol: np.ndarray = field(init=False, repr=False)
    _prior_logdet: float = field(init=False, repr=False)

    def __post_init__(self):
        stats = tuple(self.statistics)
        if not stats:
            raise ModelError("a model needs at least one statistic")
        object.__setattr__(self, "statistics", stats)
        d = len(stats)
        mean = np.zeros(d) if self.prior_mean is None else np.asarray(self.prior_mean, dtype=float).reshape(-1)
        cov = DEFAULT_PRIOR_VAR * np.eye(d) if self.prior_cov is None else np.atleast_2d(np.asarray(self.prior_cov, dtype=float))
        if mean.shape != (d,) or cov.shape != (d, d):
            raise ModelError(f"prior dimensions {mean.shape}/{cov.shape} do not match {d} statistics")
        if not np.allclose(cov, cov.T):
            raise ModelError("prior covariance must be symmetric")
        try:
            chol = np.linalg.cholesky(cov)
        except np.linalg.LinAlgError as exc:
            raise ModelError("prior covariance must be positive definite") from exc
        mean.setflags(write=False)
        cov.setflags(write=False)
        object.__setattr__(self, "prior_mean", mean)
        object.__setattr__(self, "prior_cov", cov)
        object.__setattr__(self, "_prior_chol", chol)
        object.__setattr__(self, "_prior_logdet", 2.0 * float(np.log(np.diag(chol)).sum()))

    @property
    def dim(self) -> int:
        return len(self.statistics)

    @property
    def labels(self) -> list[str]:
        return [s.label for s in self.statistics]

    def log_prior(self, theta) -> float:
        theta = np.asarray(theta, dtype=float)
        if theta.shape != (self.dim,):
            raise ModelError(f"theta has shape {theta.shape}, model {self.id} needs ({self.dim},)")
        z = np.linalg.solve(self._prior_chol, theta - self.prior_mean)
        return float(-0.5 * (z @ z) - 0.5 * self._prior_logdet - 0.5 * self.dim * math.log(2 * math.pi))

    def extend(self, stat: Statistic, id=None, prior_mean: float = 0.0, prior_var: float = DEFAULT_PRIOR_VAR) -> "ModelSpec":
        """The nested model with one statistic appended; prior blocks stay independent."""
        d = self.dim
        cov = np.zeros((d + 1, d + 1))
        cov[:d, :d] = self.prior_cov
        cov[d, d] = prior_var
        return ModelSpec(id if id is not None else f"{self.id}+{stat.label}",
                         self.statistics + (stat,),
                         np.append(self.prior_mean, prior_mean), cov)

    def same_structure(self, other: "ModelSpec") -> bool:
        return (self.statistics == other.statistics
                and np.array_equal(self.prior_mean, other.prior_mean)
                and np.array_equal(self.prior_cov, other.prior_cov))

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "statistics": [s.to_dict() for s in self.statistics],
            "prior_mean": self.prior_mean.tolist(),
            "prior_cov": self.prior_cov.tolist(),
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "ModelSpec":
        try:
            stats = tuple(Statistic.from_dict(s) for s in d["statistics"])
        except KeyError as exc:
            raise ModelError(f"model config is missing field {exc}") from exc
        dim = len(stats)
        cov = d.get("prior_cov")
        if cov is None and "prior_sd_diag" in d:
            sd = np.broadcast_to(np.asarray(d["prior_sd_diag"], dtype=float), (dim,))
            cov = np.diag(sd ** 2)
        mean = d.get("prior_mean")
        if mean is not None:
            mean = np.broadcast_to(np.asarray(mean, dtype=float), (dim,)).copy()
        return cls(d.get("id", 0), stats, mean, cov)


def load_models(path: str | Path) -> list[ModelSpec]:
    """Read a JSON model config: a single model object, a list, or ``{"models": [...]}``."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"model config not found: {path}")
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ModelError(f"{path}: invalid JSON ({exc})") from exc
    if isinstance(data, Mapping) and "models" in data:
        data = data["models"]
    if isinstance(data, Mapping):
        data = [data]
    models = []
    for k, entry in enumerate(data, start=1):
        entry = dict(entry)
        entry.setdefault("id", k)
        models.append(ModelSpec.from_dict(entry))
    return models


@dataclass(frozen=True)
class CompiledModel:
    """Array encoding of a model's statistics for the compiled kernels."""

    codes: np.ndarray
    decays: np.ndarray
    covx: np.ndarray
    covcol: np.ndarray


def compile_model(m: ModelSpec, covs: Mapping[str, NodeCovariate] | None, n: int) -> CompiledModel:
    covs = covs or {}
    names: list[str] = []
    covcol = np.full(m.dim, -1, dtype=np.int64)
    for s, stat in enumerate(m.statistics):
        if stat.covariate is None:
            continue
        if stat.covariate not in covs:
            raise ModelError(f"model {m.id} references missing covariate {stat.covariate!r}")
        if len(covs[stat.covariate].values) != n:
            raise ModelError(f"covariate {stat.covariate!r} has {len(covs[stat.covariate].values)} values for {n} nodes")
        if stat.covariate not in names:
            names.append(stat.covariate)
        covcol[s] = names.index(stat.covariate)
    covx = np.zeros((n, max(len(names), 1)))
    for c, name in enumerate(names):
        covx[:, c] = covs[name].values
    return CompiledModel(
        codes=np.array([int(s.kind) for s in m.statistics], dtype=np.int64),
        decays=np.array([s.decay or 0.0 for s in m.statistics], dtype=float),
        covx=covx,
        covcol=covcol,
    )


def compute_statistics(g: Graph, covs: Mapping[str, NodeCovariate] | None, m: ModelSpec) -> np.ndarray:
    cm = compile_model(m, covs, g.n)
    out = np.zeros(m.dim)
    K.full_stats(np.ascontiguousarray(g.adjacency), cm.codes, cm.decays, cm.covx, cm.covcol, out)
    return out


def change_statistics(g: Graph, covs: Mapping[str, NodeCovariate] | None, m: ModelSpec, i: int, j: int) -> np.ndarray:
    """s(g with {i,j} toggled) - s(g), evaluated locally (0-based nodes)."""
    g._check_pair(i, j)
    cm = compile_model(m, covs, g.n)
    adj = g.adjacency.copy()
    deg = g.degrees()
    present = bool(adj[i, j])
    if present:
        adj[i, j] = adj[j, i] = 0
        deg[i] -= 1
        deg[j] -= 1
    out = np.zeros(m.dim)
    K.change_add(adj, deg, i, j, cm.codes, cm.decays, cm.covx, cm.covcol, out)
    return -out if present else out


def degree_histogram(g: Graph) -> np.ndarray:
    """D_k = number of nodes with degree k, for k = 0..n-1."""
    return np.bincount(g.degrees(), minlength=g.n)[: g.n]


def esp_histogram(g: Graph) -> np.ndarray:
    """EP_k = number of edges whose endpoints share exactly k partners, k = 0..n-2."""
    adj = g.adjacency.astype(np.int64)
    sp = adj @ adj
    iu, ju = np.nonzero(np.triu(adj, 1))
    return np.bincount(sp[iu, ju], minlength=max(g.n - 1, 1))[: max(g.n - 1, 1)]
