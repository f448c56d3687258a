"""Run settings for the worked examples and drivers shared by scripts/ and the acceptance tests."""

from __future__ import annotations

import time
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .datasets import load_fixture
from .evidence import EvidenceEstimate, PathSchedule, log_evidence
from .exchange import ExchangeConfig
from .modelselect import ModelSelectionResult, ModelSpace, PilotTuning, load_space, run_selection
from .records import substream
from .sampler import SimConfig

CONFIG_DIR = Path(__file__).resolve().parents[2] / "configs"


@dataclass(frozen=True)
class SelectionSettings:
    iterations: int = 100_000
    aux_iterations: int = 3000
    offline_per_dim: int = 1000  # retained offline iterations per parameter
    offline_burn_per_dim: int = 100

    def aux(self) -> SimConfig:
        return SimConfig(iterations=self.aux_iterations, init="observed")

    def offline(self, m) -> ExchangeConfig:
        return ExchangeConfig.per_dimension(m.dim, self.offline_per_dim, self.offline_burn_per_dim, aux=self.aux())


@dataclass(frozen=True)
class EvidenceSettings:
    path: PathSchedule = field(default_factory=PathSchedule)
    posterior_per_dim_plus_one: int = 2500  # KDE sample of 2500 * (D + 1) draws
    burn_per_dim: int = 100
    aux_iterations: int = 3000

    def posterior(self, m) -> ExchangeConfig:
        retained = self.posterior_per_dim_plus_one * (m.dim + 1)
        burn = self.burn_per_dim * m.dim
        return ExchangeConfig(main_iterations=retained + burn, burn_in=burn,
                              aux=SimConfig(iterations=self.aux_iterations, init="observed"))


@dataclass(frozen=True)
class Example:
    name: str
    fixture: str
    config: str
    selection: SelectionSettings
    evidence: EvidenceSettings | None = None

    def space(self) -> ModelSpace:
        return load_space(CONFIG_DIR / self.config)


EXAMPLES = {
    "gamaneg": Example("gamaneg", "gamaneg", "gama_models.json", SelectionSettings(), EvidenceSettings()),
    "gamapos": Example("gamapos", "gamapos", "gama_models.json", SelectionSettings(), EvidenceSettings()),
    "lazega1": Example("lazega1", "lazega", "lazega_example1.json",
                       SelectionSettings(100_000, 25_000, 5000, 1000),
                       EvidenceSettings(PathSchedule(I=200, draws_per_point=500))),
    "lazega2": Example("lazega2", "lazega", "lazega_example2.json",
                       SelectionSettings(50_000, 25_000, 4000, 1000)),
}

# reduced Lazega Example 1 run: 10k online iterations with 5k auxiliary proposals
LAZEGA1_SMOKE = replace(EXAMPLES["lazega1"], selection=SelectionSettings(10_000, 5000, 1000, 200))


def run_example_selection(ex: Example, seed: int, method: str = "auto") -> tuple[ModelSelectionResult, float]:
    y, covs = load_fixture(ex.fixture)
    space = ex.space()
    s = ex.selection
    t0 = time.perf_counter()
    kw = {"offline_cfg": s.offline} if method == "auto" else {"tuning": PilotTuning.default(space)}
    res = run_selection(method, space, y, covs, s.iterations, substream(seed, ex.name, method), aux_cfg=s.aux(), **kw)
    return res, time.perf_counter() - t0


def run_example_evidence(ex: Example, seed: int) -> tuple[list[EvidenceEstimate], np.ndarray, float]:
    """Evidence per model and the matrix BF[h, k] = p(y|m_h) / p(y|m_k)."""
    if ex.evidence is None:
        raise ValueError(f"{ex.name} has no evidence settings")
    y, covs = load_fixture(ex.fixture)
    space = ex.space()
    t0 = time.perf_counter()
    est = [log_evidence(y, m, covs, ex.evidence.path, ex.evidence.posterior(m), substream(seed, ex.name, "evidence", m.id))
           for m in space.models]
    le = np.array([e.log_evidence for e in est])
    return est, np.exp(le[:, None] - le[None, :]), time.perf_counter() - t0
