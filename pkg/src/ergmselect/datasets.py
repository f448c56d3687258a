"""Locating the classic network fixtures (Gahuku-Gama tribes, Lazega lawyers).

The edge lists are not redistributed with the package. Place the standard
public versions in ``$ERGMSELECT_DATA`` (or ``src/ergmselect/data``) as

    gamaneg.edgelist    16 nodes, 29 edges
    gamapos.edgelist    16 nodes, 29 edges
    lazega.edgelist     36 nodes, 115 edges
    lazega_attr.csv     header row with at least gender, practice, school

Edge lists use the plain-text format read by :func:`read_edge_list`.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from pathlib import Path

from .graph import Graph, NodeCovariate, read_covariates, read_edge_list

PACKAGE_DATA = Path(__file__).parent / "data"


@dataclass(frozen=True)
class FixtureInfo:
    filename: str
    n: int
    edges: int
    covariates: str | None = None


FIXTURES = {
    "gamaneg": FixtureInfo("gamaneg.edgelist", 16, 29),
    "gamapos": FixtureInfo("gamapos.edgelist", 16, 29),
    "lazega": FixtureInfo("lazega.edgelist", 36, 115, "lazega_attr.csv"),
}


def data_dirs() -> list[Path]:
    dirs = []
    if os.environ.get("ERGMSELECT_DATA"):
        dirs.append(Path(os.environ["ERGMSELECT_DATA"]))
    dirs.append(PACKAGE_DATA)
    return dirs


def _find(filename: str) -> Path | None:
    for d in data_dirs():
        p = d / filename
        if p.exists():
            return p
    return None


def fixture_available(name: str) -> bool:
    """True when the fixture exists and matches the standard node and edge counts."""
    info = FIXTURES[name]
    path = _find(info.filename)
    if path is None:
        return False
    try:
        g = read_edge_list(path, n=info.n)
    except (ValueError, OSError):
        return False
    if g.n != info.n or g.edge_count != info.edges:
        return False
    return info.covariates is None or _find(info.covariates) is not None


def load_fixture(name: str) -> tuple[Graph, dict[str, NodeCovariate]]:
    if name not in FIXTURES:
        raise KeyError(f"unknown fixture {name!r}; known: {sorted(FIXTURES)}")
    info = FIXTURES[name]
    path = _find(info.filename)
    if path is None:
        raise FileNotFoundError(
            f"fixture {info.filename} not found in {[str(d) for d in data_dirs()]}; "
            "see ergmselect.datasets for the expected files")
    g = read_edge_list(path, n=info.n)
    if g.edge_count != info.edges:
        raise ValueError(f"{path} has {g.edge_count} edges, the standard version has {info.edges}")
    covs: dict[str, NodeCovariate] = {}
    if info.covariates:
        cpath = _find(info.covariates)
        if cpath is None:
            raise FileNotFoundError(f"covariate file {info.covariates} not found")
        covs = read_covariates(cpath, n=info.n)
    return g, covs
