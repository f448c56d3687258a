"""Undirected simple graphs on labelled nodes.

Nodes are 0-based internally; every file format and every emitted output
is 1-based.
"""

from __future__ import annotations

import csv
import itertools
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, Sequence

import numpy as np

MAX_ENUMERATION_NODES = 5


class GraphError(ValueError):
    pass


class Graph:
    """Immutable undirected simple graph backed by a symmetric 0/1 matrix."""

    __slots__ = ("_adj", "_edge_count")

    def __init__(self, adjacency: np.ndarray, *, _trusted: bool = False):
        adj = np.asarray(adjacency)
        if not _trusted:
            if adj.ndim != 2 or adj.shape[0] != adj.shape[1] or adj.shape[0] < 1:
                raise GraphError(f"adjacency must be a square matrix, got shape {adj.shape}")
            adj = (adj != 0).astype(np.uint8)
            if np.any(np.diag(adj)):
                raise GraphError("self-loops are not allowed")
            if not np.array_equal(adj, adj.T):
                raise GraphError("adjacency must be symmetric")
        adj.setflags(write=False)
        self._adj = adj
        self._edge_count = int(adj.sum()) // 2

    @classmethod
    def empty(cls, n: int) -> "Graph":
        if n < 1:
            raise GraphError("a graph needs at least one node")
        return cls(np.zeros((n, n), dtype=np.uint8), _trusted=True)

    @classmethod
    def complete(cls, n: int) -> "Graph":
        adj = np.ones((n, n), dtype=np.uint8)
        np.fill_diagonal(adj, 0)
        return cls(adj, _trusted=True)

    @property
    def n(self) -> int:
        return self._adj.shape[0]

    @property
    def edge_count(self) -> int:
        return self._edge_count

    @property
    def adjacency(self) -> np.ndarray:
        """Read-only uint8 view of the adjacency matrix."""
        return self._adj

    @property
    def n_dyads(self) -> int:
        return self.n * (self.n - 1) // 2

    def has_edge(self, i: int, j: int) -> bool:
        return bool(self._adj[i, j])

    def degrees(self) -> np.ndarray:
        return self._adj.sum(axis=1).astype(np.int64)

    def edges(self) -> list[tuple[int, int]]:
        """Edges as 0-based pairs (i, j) with i < j."""
        rows, cols = np.nonzero(np.triu(self._adj, 1))
        return list(zip(rows.tolist(), cols.tolist()))

    def _check_pair(self, i: int, j: int) -> None:
        if i == j:
            raise GraphError(f"dyad ({i}, {j}) is a self-loop")
        if not (0 <= i < self.n and 0 <= j < self.n):
            raise GraphError(f"dyad ({i}, {j}) out of range for n={self.n}")

    def toggle(self, i: int, j: int) -> "Graph":
        """Return a copy with dyad {i, j} flipped (0-based)."""
        self._check_pair(i, j)
        adj = self._adj.copy()
        adj[i, j] = adj[j, i] = 1 - adj[i, j]
        return Graph(adj, _trusted=True)

    def shared_partners(self, i: int, j: int) -> int:
        self._check_pair(i, j)
        return int(np.dot(self._adj[i].astype(np.int64), self._adj[j]))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return np.array_equal(self._adj, other._adj)

    def __hash__(self) -> int:
        return hash((self.n, np.packbits(self._adj).tobytes()))

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, edges={self.edge_count})"


def from_edge_list(n: int, edges: Iterable[Sequence[int]]) -> Graph:
    """Build a graph from 1-based node pairs; duplicates collapse to one edge."""
    if n < 1:
        raise GraphError("a graph needs at least one node")
    adj = np.zeros((n, n), dtype=np.uint8)
    for pair in edges:
        i, j = int(pair[0]), int(pair[1])
        if not (1 <= i <= n and 1 <= j <= n):
            raise GraphError(f"edge ({i}, {j}) out of range for n={n}")
        if i == j:
            raise GraphError(f"edge ({i}, {j}) is a self-loop")
        adj[i - 1, j - 1] = adj[j - 1, i - 1] = 1
    return Graph(adj, _trusted=True)


def enumerate_graphs(n: int) -> Iterator[Graph]:
    """Yield every graph on n <= 5 nodes exactly once."""
    if n > MAX_ENUMERATION_NODES:
        raise GraphError(f"enumeration limited to n <= {MAX_ENUMERATION_NODES}, got {n}")
    if n < 1:
        raise GraphError("a graph needs at least one node")
    pairs = list(itertools.combinations(range(n), 2))
    for mask in range(1 << len(pairs)):
        adj = np.zeros((n, n), dtype=np.uint8)
        for bit, (i, j) in enumerate(pairs):
            if mask >> bit & 1:
                adj[i, j] = adj[j, i] = 1
        yield Graph(adj, _trusted=True)


@dataclass(frozen=True)
class NodeCovariate:
    name: str
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.ndim != 1:
            raise GraphError(f"covariate {self.name!r} must be one-dimensional")
        if not np.all(np.isfinite(vals)):
            raise GraphError(f"covariate {self.name!r} has non-finite values")
        object.__setattr__(self, "values", vals)


_SPLIT = re.compile(r"[,\s]+")


def read_edge_list(path: str | Path, n: int | None = None) -> Graph:
    """Read an edge list file: one ``i j`` or ``i,j`` pair per line, 1-based.

    Lines starting with ``#`` are comments. A ``# nodes: N`` comment fixes
    the node count (needed when the highest-numbered nodes are isolated).
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"edge list not found: {path}")
    edges = []
    declared = None
    for lineno, raw in enumerate(path.read_text().splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            m = re.match(r"#\s*nodes\s*[:=]\s*(\d+)", line, re.I)
            if m:
                declared = int(m.group(1))
            continue
        parts = [p for p in _SPLIT.split(line) if p]
        if len(parts) < 2:
            raise GraphError(f"{path}:{lineno}: expected two node ids, got {raw!r}")
        try:
            edges.append((int(parts[0]), int(parts[1])))
        except ValueError as exc:
            raise GraphError(f"{path}:{lineno}: non-integer node id in {raw!r}") from exc
    if n is None:
        n = declared
    if n is None:
        n = max((max(e) for e in edges), default=0)
    return from_edge_list(n, edges)


def write_edge_list(g: Graph, path: str | Path) -> None:
    lines = [f"# nodes: {g.n}"] + [f"{i + 1} {j + 1}" for i, j in g.edges()]
    Path(path).write_text("\n".join(lines) + "\n")


def read_covariates(path: str | Path, n: int | None = None) -> dict[str, NodeCovariate]:
    """Read a delimited covariate table: header row of names, one row per node."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"covariate file not found: {path}")
    text = path.read_text()
    dialect = csv.Sniffer().sniff(text.splitlines()[0], delimiters=",\t; ")
    rows = [r for r in csv.reader(text.splitlines(), dialect) if r and not r[0].startswith("#")]
    header, body = [h.strip() for h in rows[0]], rows[1:]
    if n is not None and len(body) != n:
        raise GraphError(f"{path}: expected {n} node rows, found {len(body)}")
    covs = {}
    for col, name in enumerate(header):
        try:
            vals = [float(r[col]) for r in body]
        except (ValueError, IndexError) as exc:
            raise GraphError(f"{path}: column {name!r} is not numeric") from exc
        covs[name] = NodeCovariate(name, np.array(vals))
    return covs
