"""Trace analysis, aggregation, landscape binning and brute-force oracles."""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass

import numpy as np

from . import kernels
from .gset import WeightedGraph
from .ising import IsingModel, Quantizer

MAXCUT_MAX_N = 24
BOLTZMANN_MAX_N = 20
_CHUNK = 1 << 16


@dataclass(frozen=True)
class CostPoint:
    cost_norm: float
    cut_norm: float
    policy: str = ""
    tau_ns: float = 0.0
    c: float = 1.0
    bits: int = 12

    def __post_init__(self):
        # cut_norm may be negative: signed-weight graphs admit negative cuts
        if not self.cost_norm > 0 or not np.isfinite(self.cut_norm):
            raise ValueError("need cost_norm > 0 and a finite cut_norm")


def oscillation_score(trace, window_fraction=0.5) -> float:
    """Population std of the energy over the last ``window_fraction`` of trace points.

    ``trace`` is a sequence of energies, of ``(t, H)`` pairs, or a run result.
    """
    if hasattr(trace, "trace_e"):
        e = np.asarray(trace.trace_e, dtype=np.float64)
    else:
        e = np.asarray(trace, dtype=np.float64)
        if e.ndim == 2:
            e = e[:, 1]
    if not 0 < window_fraction <= 1:
        raise ValueError("window_fraction must be in (0, 1]")
    k = int(np.floor(e.size * window_fraction))
    if k < 10:
        raise ValueError(f"trace window has {k} points, need at least 10")
    return float(np.std(e[-k:]))


def aggregate_mean_cut(results) -> float:
    """Mean over instances of the per-instance mean normalized cut.

    ``results`` holds run results (with ``graph`` and ``normalized_cut``)
    or ``(instance, normalized_cut)`` pairs.
    """
    groups = defaultdict(list)
    for r in results:
        if isinstance(r, tuple):
            name, value = r
        else:
            name, value = r.graph, r.normalized_cut
        groups[name].append(value)
    if not groups:
        raise ValueError("no results to aggregate")
    return float(np.mean([np.mean(v) for v in groups.values()]))


def instance_means(results) -> dict:
    groups = defaultdict(list)
    for name, value in results:
        groups[name].append(value)
    return {k: float(np.mean(v)) for k, v in groups.items()}


def landscape_bins(points, n_bins=40) -> list[tuple[float, float, float]]:
    """Equal-width cost bins over [min, max]; ``(center, median cut, max cut)`` per non-empty bin."""
    pts = list(points)
    if not pts:
        raise ValueError("no points to bin")
    cost = np.array([p.cost_norm for p in pts])
    cut = np.array([p.cut_norm for p in pts])
    lo, hi = cost.min(), cost.max()
    width = (hi - lo) / n_bins
    if width == 0:
        return [(float(lo), float(np.median(cut)), float(cut.max()))]
    idx = np.minimum(((cost - lo) / width).astype(np.int64), n_bins - 1)
    out = []
    for k in np.unique(idx):
        sel = cut[idx == k]
        out.append((float(lo + (k + 0.5) * width), float(np.median(sel)), float(sel.max())))
    return out


def _spin_chunks(n, count, fixed_first=False):
    """Yield (codes, spins) blocks enumerating ``count`` states; bit i of the code is s_i = +1."""
    shifts = np.arange(n, dtype=np.int64)
    for start in range(0, count, _CHUNK):
        codes = np.arange(start, min(start + _CHUNK, count), dtype=np.int64)
        full = (codes << 1) | 1 if fixed_first else codes
        bits = (full[:, None] >> shifts) & 1
        yield codes, (2 * bits - 1).astype(np.float64)


def brute_force_maxcut(graph: WeightedGraph):
    """Exact MaxCut by enumeration with spin 0 fixed to +1. Returns ``(best_cut, state)``."""
    n = graph.n
    if n > MAXCUT_MAX_N:
        raise ValueError(f"brute force limited to n <= {MAXCUT_MAX_N}, got {n}")
    W = np.zeros((n, n))
    for i, j, w in graph.edges:
        W[i, j] += w
        W[j, i] += w
    total = graph.total_weight
    best, best_s = None, None
    for _, s in _spin_chunks(n, 1 << (n - 1), fixed_first=True):
        # cut = (W_total - sum_{i<j} w s_i s_j) / 2
        cuts = np.rint((total - 0.5 * np.einsum("ki,ki->k", s @ W, s)) / 2).astype(np.int64)
        k = int(np.argmax(cuts))
        if best is None or cuts[k] > best:
            best, best_s = int(cuts[k]), s[k].astype(np.int8)
    return best, best_s


def all_energies(model: IsingModel) -> np.ndarray:
    n = model.n
    J = model.couplings.toarray()
    out = np.empty(1 << n)
    for codes, s in _spin_chunks(n, 1 << n):
        out[codes] = -0.5 * np.einsum("ki,ki->k", s @ J, s) - s @ model.biases
    return out


def brute_force_boltzmann(model: IsingModel, i0) -> np.ndarray:
    """Exact law P(s) ~ exp(-i0 H(s)) over all 2**n states, indexed by spin code.

    This is the stationary law of single-site updates with
    P(s_i = +1 | rest) = (1 + tanh(i0 * field_i)) / 2: the conditional odds
    are exp(2 i0 field_i) and flipping s_i changes H by 2 s_i field_i.
    """
    if model.n > BOLTZMANN_MAX_N:
        raise ValueError(f"brute force limited to n <= {BOLTZMANN_MAX_N}, got {model.n}")
    logw = -i0 * all_energies(model)
    logw -= logw.max()
    p = np.exp(logw)
    return p / p.sum()


def state_code(values) -> int:
    return int(sum(1 << i for i, v in enumerate(values) if v > 0))


def sample_sequential(model: IsingModel, i0, n_sweeps, burn_in=0, bits=12, seed=0) -> np.ndarray:
    """Empirical state distribution of sequential sweeps at constant ``i0``.

    One state is recorded after each sweep past ``burn_in``.
    """
    if model.n > BOLTZMANN_MAX_N:
        raise ValueError(f"state histogram limited to n <= {BOLTZMANN_MAX_N}")
    rng = np.random.default_rng(seed)
    state = (2 * rng.integers(0, 2, model.n) - 1).astype(np.int8)
    total = burn_in + n_sweeps
    u = 2.0 * rng.random((total, model.n)) - 1.0
    q = Quantizer.for_model(model, bits)
    hist = np.zeros(1 << model.n, dtype=np.int64)
    indptr, indices, data = model.csr_arrays()
    kernels.sequential_sweeps(indptr, indices, data, model.biases, state,
                              np.full(total, float(i0)), u, q.step, q.limit, 0.0,
                              np.empty(total), hist, burn_in)
    return hist / hist.sum()


def total_variation(p, q) -> float:
    return 0.5 * float(np.abs(np.asarray(p) - np.asarray(q)).sum())
