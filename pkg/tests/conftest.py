import os
from pathlib import Path

import numpy as np
import pytest

from pbitsim.gset import GRAPH_DIR_ENV, WeightedGraph, find_graph_file, format_gset


def random_graph(n, m, rng, signed=False):
    """Simple random graph with m distinct edges and +-1 (or +1) weights."""
    pairs = set()
    while len(pairs) < m:
        i, j = sorted(int(v) for v in rng.integers(0, n, 2))
        if i != j:
            pairs.add((i, j))
    edges = []
    for i, j in sorted(pairs):
        w = int(rng.choice([-1, 1])) if signed else 1
        edges.append((i, j, w))
    return WeightedGraph(n, tuple(edges))


def toroidal_graph(rows, cols, rng, signed=True):
    n = rows * cols
    edges = set()
    for r in range(rows):
        for c in range(cols):
            v = r * cols + c
            for u in (r * cols + (c + 1) % cols, ((r + 1) % rows) * cols + c):
                edges.add((min(u, v), max(u, v)))
    out = [(i, j, int(rng.choice([-1, 1])) if signed else 1) for i, j in sorted(edges)]
    return WeightedGraph(n, tuple(out))


def write_graph(directory, name, graph):
    p = Path(directory) / name
    p.write_text(format_gset(graph))
    return p


def gset_available(*names):
    d = os.environ.get(GRAPH_DIR_ENV)
    if not d:
        return False
    try:
        for name in names:
            find_graph_file(name, d)
    except FileNotFoundError:
        return False
    return True


class ScriptedRng:
    """Replays fixed waits, spins and uniforms through the Generator methods gillespie_step uses."""

    def __init__(self, waits, spins, u):
        self.w, self.s, self.u = list(waits), list(spins), list(u)

    def exponential(self, scale):
        return self.w.pop(0)

    def integers(self, n):
        return self.s.pop(0)

    def random(self):
        return (self.u.pop(0) + 1.0) / 2.0


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# acceptance-criterion outcomes, printed once at the end of the session
ACCEPTANCE = []


def record_acceptance(number, title, status, detail=""):
    ACCEPTANCE.append((number, title, status, detail))
    print(f"criterion {number:>2} {status:<7} {title}: {detail}")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, status, detail in sorted(ACCEPTANCE):
        terminalreporter.write_line(f"criterion {number:>2} {status:<7} {title}: {detail}")
