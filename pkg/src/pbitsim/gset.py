"""G-set graph files, the benchmark registry, and the MaxCut -> Ising mapping.

File format: first line ``N M``, then M lines ``i j w`` with 1-based vertex
indices and integer weights. G-set files are not shipped with the package;
they are looked up in a graph directory (``--graph-dir`` or ``PBIT_GRAPH_DIR``).
"""
from __future__ import annotations

import os
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .ising import IsingModel, SpinState

GRAPH_DIR_ENV = "PBIT_GRAPH_DIR"


class GsetParseError(ValueError):
    def __init__(self, line, msg):
        super().__init__(f"line {line}: {msg}")
        self.line = line


class UnknownBenchmarkError(KeyError):
    def __str__(self):
        return f"unknown benchmark: {self.args[0]}"


@dataclass(frozen=True)
class WeightedGraph:
    n: int
    edges: tuple  # ((i, j, w), ...) with 0 <= i < j < n

    @property
    def m(self) -> int:
        return len(self.edges)

    def edge_arrays(self):
        if not self.edges:
            z = np.zeros(0, dtype=np.int64)
            return z, z, z
        a = np.asarray(self.edges, dtype=np.int64)
        return a[:, 0], a[:, 1], a[:, 2]

    @property
    def total_weight(self) -> int:
        return int(sum(w for _, _, w in self.edges))


@dataclass(frozen=True)
class BenchmarkEntry:
    name: str
    n: int
    m: int
    target: int

    def __post_init__(self):
        if self.target <= 0:
            raise ValueError(f"{self.name}: target must be positive")


_REGISTRY = (
    BenchmarkEntry("G1", 800, 19176, 11624),
    BenchmarkEntry("G6", 800, 19176, 2178),
    BenchmarkEntry("G11", 800, 1600, 564),
    BenchmarkEntry("G14", 800, 4694, 3064),
    BenchmarkEntry("G18", 800, 4694, 992),
    BenchmarkEntry("G22", 2000, 19990, 13359),
    BenchmarkEntry("G34", 2000, 4000, 1384),
    BenchmarkEntry("G38", 2000, 11779, 7688),
    BenchmarkEntry("G39", 2000, 11778, 2408),
    BenchmarkEntry("G47", 1000, 9990, 6657),
)


def registry() -> list[BenchmarkEntry]:
    return list(_REGISTRY)


def lookup(name: str) -> BenchmarkEntry:
    for e in _REGISTRY:
        if e.name.lower() == name.lower():
            return e
    raise UnknownBenchmarkError(name)


def parse_gset(text) -> WeightedGraph:
    if isinstance(text, (bytes, bytearray)):
        text = text.decode("ascii")
    lines = text.splitlines()
    # (line number, tokens) for non-blank lines
    rows = [(k + 1, ln.split()) for k, ln in enumerate(lines) if ln.strip()]
    if not rows:
        raise GsetParseError(1, "empty input, expected header 'N M'")
    hline, head = rows[0]
    if len(head) != 2:
        raise GsetParseError(hline, f"malformed header {' '.join(head)!r}, expected 'N M'")
    n, m = (_int(tok, hline) for tok in head)
    if n < 1 or m < 0:
        raise GsetParseError(hline, f"invalid header values N={n} M={m}")
    body = rows[1:]
    if len(body) != m:
        raise GsetParseError(hline, f"header declares {m} edges, found {len(body)}")
    seen = set()
    edges = []
    for lineno, toks in body:
        if len(toks) != 3:
            raise GsetParseError(lineno, f"expected 'i j w', got {' '.join(toks)!r}")
        i, j, w = (_int(tok, lineno) for tok in toks)
        for v in (i, j):
            if not 1 <= v <= n:
                raise GsetParseError(lineno, f"vertex {v} outside [1, {n}]")
        if i == j:
            raise GsetParseError(lineno, f"self-loop on vertex {i}")
        a, b = (i - 1, j - 1) if i < j else (j - 1, i - 1)
        if (a, b) in seen:
            raise GsetParseError(lineno, f"duplicate edge {i} {j}")
        seen.add((a, b))
        edges.append((a, b, w))
    return WeightedGraph(n, tuple(edges))


def _int(tok, lineno):
    try:
        return int(tok)
    except ValueError:
        raise GsetParseError(lineno, f"not an integer: {tok!r}") from None


def format_gset(graph: WeightedGraph) -> str:
    out = [f"{graph.n} {graph.m}"]
    out += [f"{i + 1} {j + 1} {w}" for i, j, w in graph.edges]
    return "\n".join(out) + "\n"


def resolve_graph_dir(graph_dir=None) -> Path | None:
    d = graph_dir or os.environ.get(GRAPH_DIR_ENV)
    return Path(d) if d else None


def find_graph_file(name, graph_dir=None) -> Path:
    d = resolve_graph_dir(graph_dir)
    if d is None:
        raise FileNotFoundError(
            f"no graph directory given for {name}; pass --graph-dir or set {GRAPH_DIR_ENV}"
        )
    for cand in (name, name.lower(), f"{name}.txt", f"{name.lower()}.txt", f"{name}.gset"):
        p = d / cand
        if p.is_file():
            return p
    raise FileNotFoundError(f"graph file for {name} not found in {d}")


def load_graph(name, graph_dir=None, entry: BenchmarkEntry | None = None) -> WeightedGraph:
    """Load ``name`` from the graph directory and check it against its registry entry."""
    graph = parse_gset(find_graph_file(name, graph_dir).read_bytes())
    if entry is None:
        try:
            entry = lookup(name)
        except UnknownBenchmarkError:
            return graph
    if (graph.n, graph.m) != (entry.n, entry.m):
        raise ValueError(
            f"{name}: file has n={graph.n}, m={graph.m}; registry expects n={entry.n}, m={entry.m}"
        )
    return graph


def to_ising(graph: WeightedGraph) -> IsingModel:
    """J_ij = -w_ij, h = 0, so that H = sum_{i<j} w_ij s_i s_j and cut = (W - H) / 2."""
    return IsingModel.from_edges(graph.n, [(i, j, -w) for i, j, w in graph.edges])


def cut_value(graph: WeightedGraph, state) -> int:
    s = state.values if isinstance(state, SpinState) else np.asarray(state)
    if s.shape != (graph.n,):
        raise ValueError(f"state has length {len(s)}, graph has {graph.n} vertices")
    i, j, w = graph.edge_arrays()
    s = s.astype(np.int64)
    # w * (1 - s_i s_j) / 2 is w on crossing edges and 0 otherwise
    return int(np.sum(w * (s[i] != s[j])))


def normalized_cut(cut, entry: BenchmarkEntry | int) -> float:
    target = entry.target if isinstance(entry, BenchmarkEntry) else entry
    if target <= 0:
        raise ValueError(f"target must be positive, got {target}")
    return cut / target
