"""Ising model, p-bit update rule, annealing schedule and input quantizer.

Energy convention::

    H(s) = -1/2 s^T J s - h^T s

with J symmetric and zero on the diagonal. The local field of spin i is
``h_i + sum_j J_ij s_j`` and a p-bit driven by gain ``i0`` outputs +1 with
probability ``(1 + tanh(i0 * field)) / 2``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

# tanh(30) == 1.0 in double precision
TANH_CLAMP = 30.0


class DegenerateModelError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class IsingModel:
    """Sparse symmetric Ising model.

    ``couplings`` is stored as a CSR matrix holding both (i, j) and (j, i).
    Build instances with :meth:`from_edges` or :meth:`from_dense`; the
    constructor validates symmetry and the empty diagonal.
    """

    couplings: sp.csr_matrix
    biases: np.ndarray
    _sigma: float | None = field(default=None, init=False, repr=False)

    def __post_init__(self):
        J = sp.csr_matrix(self.couplings, dtype=np.float64)
        J.sum_duplicates()
        J.eliminate_zeros()
        J.sort_indices()
        n = J.shape[0]
        if J.shape != (n, n):
            raise ValueError(f"coupling matrix must be square, got {J.shape}")
        if n < 2:
            raise ValueError("an Ising model needs at least 2 spins")
        if J.diagonal().any():
            raise ValueError("couplings must have an empty diagonal")
        if (J - J.T).count_nonzero():
            raise ValueError("couplings must be symmetric")
        h = np.asarray(self.biases, dtype=np.float64).reshape(-1)
        if h.shape != (n,):
            raise ValueError(f"bias vector has length {h.shape[0]}, expected {n}")
        object.__setattr__(self, "couplings", J)
        object.__setattr__(self, "biases", h)

    @classmethod
    def from_edges(cls, n, edges, biases=None):
        """Build from ``(i, j, J_ij)`` triples, each unordered pair given once."""
        edges = list(edges)
        if edges:
            i, j, w = (np.asarray(col) for col in zip(*edges))
        else:
            i = j = np.zeros(0, dtype=np.int64)
            w = np.zeros(0)
        rows = np.concatenate([i, j]).astype(np.int64)
        cols = np.concatenate([j, i]).astype(np.int64)
        vals = np.concatenate([w, w]).astype(np.float64)
        J = sp.coo_matrix((vals, (rows, cols)), shape=(n, n)).tocsr()
        h = np.zeros(n) if biases is None else biases
        return cls(J, h)

    @classmethod
    def from_dense(cls, J, biases=None):
        J = np.asarray(J, dtype=np.float64)
        h = np.zeros(J.shape[0]) if biases is None else biases
        return cls(sp.csr_matrix(J), h)

    @property
    def n(self) -> int:
        return self.couplings.shape[0]

    @property
    def sigma(self) -> float:
        if self._sigma is None:
            object.__setattr__(self, "_sigma", coupling_sigma(self))
        return self._sigma

    def full_scale(self) -> float:
        """Largest possible |local field|: max_i (|h_i| + sum_j |J_ij|)."""
        row_abs = np.asarray(abs(self.couplings).sum(axis=1)).reshape(-1)
        return float(np.max(np.abs(self.biases) + row_abs))

    def csr_arrays(self):
        """``(indptr, indices, data)`` as int64/int64/float64 arrays for the kernels."""
        J = self.couplings
        return (
            J.indptr.astype(np.int64),
            J.indices.astype(np.int64),
            J.data.astype(np.float64),
        )


@dataclass
class SpinState:
    values: np.ndarray
    clock: float = 0.0

    def __post_init__(self):
        v = np.asarray(self.values)
        if v.ndim != 1 or not np.all((v == 1) | (v == -1)):
            raise ValueError("spin values must be a 1-d vector of +1/-1")
        self.values = v.astype(np.int8)

    def __len__(self):
        return self.values.shape[0]

    @classmethod
    def random(cls, n, rng):
        return cls(2 * rng.integers(0, 2, size=n, dtype=np.int8) - 1)


@dataclass(frozen=True)
class AnnealSchedule:
    """Linear ramp of the pseudo inverse temperature from i0_min to i0_max."""

    i0_min: float
    i0_max: float
    t_total: float

    def __post_init__(self):
        if not 0 < self.i0_min <= self.i0_max:
            raise ValueError(f"need 0 < i0_min <= i0_max, got {self.i0_min}, {self.i0_max}")
        if not self.t_total > 0:
            raise ValueError(f"t_total must be positive, got {self.t_total}")

    @classmethod
    def for_model(cls, model: IsingModel, t_total, lo=0.1, hi=10.0):
        """Default ramp 0.1/sigma -> 10/sigma."""
        s = model.sigma
        return cls(lo / s, hi / s, t_total)

    def i0_checked(self, t) -> tuple[float, bool]:
        """Return ``(i0, clamped)``; ``clamped`` flags a time outside [0, t_total]."""
        clamped = t < 0 or t > self.t_total
        t = min(max(t, 0.0), self.t_total)
        return self.i0_min + (self.i0_max - self.i0_min) * (t / self.t_total), clamped

    def i0(self, t) -> float:
        return self.i0_checked(t)[0]


def anneal_i0(schedule: AnnealSchedule, t) -> float:
    return schedule.i0(t)


@dataclass(frozen=True)
class Quantizer:
    """Symmetric mid-rise uniform quantizer with ``2**bits`` levels on [-S, S]."""

    bits: int
    full_scale: float

    def __post_init__(self):
        if not 1 <= self.bits <= 12:
            raise ValueError(f"bits must be in 1..12, got {self.bits}")
        if not self.full_scale > 0:
            raise ValueError(f"full_scale must be positive, got {self.full_scale}")

    @classmethod
    def for_model(cls, model: IsingModel, bits):
        return cls(bits, model.full_scale())

    @property
    def levels(self) -> int:
        return 2 ** self.bits

    @property
    def step(self) -> float:
        return 2.0 * self.full_scale / self.levels

    @property
    def limit(self) -> float:
        """Largest output magnitude, S - step/2."""
        return self.full_scale - self.step / 2

    def __call__(self, x):
        return quantize(self, x)


def quantize(q: Quantizer, x):
    step, lim = q.step, q.limit
    y = (np.floor(np.asarray(x, dtype=np.float64) / step) + 0.5) * step
    y = np.clip(y, -lim, lim)
    return float(y) if y.ndim == 0 else y


def energy(model: IsingModel, state) -> float:
    s = _values(state, model.n).astype(np.float64)
    return float(-0.5 * s @ (model.couplings @ s) - model.biases @ s)


def local_field(model: IsingModel, state, i: int) -> float:
    s = _values(state, model.n)
    if not 0 <= i < model.n:
        raise IndexError(f"spin index {i} out of range for n={model.n}")
    J = model.couplings
    lo, hi = J.indptr[i], J.indptr[i + 1]
    return float(model.biases[i] + J.data[lo:hi] @ s[J.indices[lo:hi]])


def local_fields(model: IsingModel, state) -> np.ndarray:
    s = _values(state, model.n).astype(np.float64)
    return model.biases + model.couplings @ s


def pbit_sample(field, i0, u):
    """sgn(u + tanh(i0 * field)) for u uniform on [-1, 1].

    Works elementwise on arrays; a zero argument maps to +1.
    """
    with np.errstate(over="ignore"):
        x = np.clip(np.multiply(i0, field), -TANH_CLAMP, TANH_CLAMP)
    out = np.where(np.add(u, np.tanh(x)) >= 0.0, 1, -1).astype(np.int8)
    return int(out) if out.ndim == 0 else out


def coupling_sigma(model: IsingModel) -> float:
    """sqrt((N - 1) * Var(J)) with the variance taken over all N*N dense entries."""
    n = model.n
    data = model.couplings.data
    if not np.any(data):
        raise DegenerateModelError("degenerate model: all couplings are zero")
    total = float(n) * n
    mean = data.sum() / total
    var = (np.sum((data - mean) ** 2) + (total - data.size) * mean**2) / total
    return math.sqrt((n - 1) * var)


def _values(state, n):
    v = state.values if isinstance(state, SpinState) else np.asarray(state)
    if v.shape != (n,):
        raise ValueError(f"state has length {v.shape[0] if v.ndim else 0}, model has {n} spins")
    return v
