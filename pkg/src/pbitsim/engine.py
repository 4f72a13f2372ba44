"""Simulation time, delayed applies and run orchestration.

A decision made at time t becomes visible at ``t + d``. At equal timestamps
applies land before reads, and applies sharing a timestamp land in creation
order. Only applies with ``apply_at <= t_total`` ever land; the final cut and
energy are taken from the visible state at ``t_total``.

Random draw order for a run seeded with ``seed`` (numpy PCG64):

* initial state: ``integers(0, 2, n)`` mapped to -1/+1;
* synchronous ticks: the selector's draws, then one uniform per selected
  spin in ascending spin index;
* tick-sequential: one uniform per spin per sweep, all sweeps drawn up front;
* gillespie: chunks of ``K`` events, each chunk drawing K waiting times,
  then K spin indices, then K uniforms.
"""
from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction

import numpy as np

from . import cost, kernels
from .gset import BenchmarkEntry, WeightedGraph, cut_value, normalized_cut
from .ising import AnnealSchedule, IsingModel, Quantizer, SpinState, energy
from .policies import (
    GILLESPIE,
    POLICIES,
    SELECTORS,
    SYNC_POLICIES,
    TICK_SEQUENTIAL,
)

SAMPLE_CAP = 2000


def spin_rate(tau_ns, c) -> float:
    """Per-logical-spin update rate 1 / (tau c), in 1/ns."""
    if tau_ns <= 0 or float(c) < 1:
        raise ValueError("need tau > 0 and c >= 1")
    return 1.0 / (tau_ns * float(c))


def as_fraction(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(str(x))


@dataclass(frozen=True, order=True)
class PendingApply:
    apply_at: float
    seq: int
    spin: int = field(compare=False)
    new_value: int = field(compare=False)


class Timeline:
    """Visible spin state plus the queue of decisions waiting to land.

    Decisions are scheduled in batches (one per tick or event); each batch
    gets a creation sequence number that breaks ties between equal
    ``apply_at`` values.
    """

    def __init__(self, initial):
        self.initial = np.array(initial, dtype=np.int8)
        self.current = self.initial.copy()
        self._heap = []
        self._seq = 0
        self.log = []  # applied batches as (apply_at, seq, spins, values)

    def schedule(self, apply_at, spins, values) -> int:
        seq = self._seq
        self._seq += 1
        heapq.heappush(self._heap, (apply_at, seq, np.asarray(spins), np.asarray(values, dtype=np.int8)))
        return seq

    def pending(self) -> list[PendingApply]:
        out = []
        for apply_at, seq, spins, values in sorted(self._heap, key=lambda b: (b[0], b[1])):
            out += [PendingApply(apply_at, seq, int(i), int(v)) for i, v in zip(spins, values)]
        return out

    def advance(self, t) -> list[tuple]:
        """Land every pending batch with ``apply_at <= t``; return ``[(apply_at, count), ...]``."""
        landed = []
        while self._heap and self._heap[0][0] <= t:
            batch = heapq.heappop(self._heap)
            apply_at, _, spins, values = batch
            self.current[spins] = values
            self.log.append(batch)
            landed.append((apply_at, len(spins)))
        return landed

    def visible_state(self, t) -> SpinState:
        """State at time ``t`` rebuilt from the initial state, without mutating the timeline."""
        s = self.initial.copy()
        batches = sorted(self.log + list(self._heap), key=lambda b: (b[0], b[1]))
        for apply_at, _, spins, values in batches:
            if apply_at > t:
                break
            s[spins] = values
        return SpinState(s, float(t))


@dataclass(frozen=True)
class RunConfig:
    """One operating point.

    ``i0_min``/``i0_max`` default to 0.1/sigma and 10/sigma of the model.
    Synchronous tick policies use tick length tau and require d == tau
    unless ``allow_delay_mismatch`` is set.
    """

    policy: str = "tick-random"
    tau_ns: float = 5.0
    c: Fraction = Fraction(1)
    bits: int = 12
    d_ns: float = 5.0
    t_total_ns: float = 500.0
    seed: int = 0
    sample_cap: int = SAMPLE_CAP
    i0_min: float | None = None
    i0_max: float | None = None
    allow_delay_mismatch: bool = False

    def __post_init__(self):
        object.__setattr__(self, "c", as_fraction(self.c))
        if self.policy not in POLICIES:
            raise ValueError(f"unknown policy {self.policy!r}; choose from {', '.join(POLICIES)}")
        if not self.tau_ns > 0:
            raise ValueError("tau must be positive")
        if self.c < 1:
            raise ValueError("reuse factor c must be >= 1")
        if not 1 <= self.bits <= 12:
            raise ValueError("DAC resolution must be in 1..12 bits")
        if self.d_ns < 0:
            raise ValueError("apply delay must be >= 0")
        if self.t_total_ns < 0:
            raise ValueError("total time must be >= 0")
        if self.sample_cap < 2:
            raise ValueError("sample_cap must be >= 2")
        if self.policy == TICK_SEQUENTIAL and self.c != 1:
            raise ValueError("tick-sequential requires c = 1")
        if (
            self.policy in SYNC_POLICIES
            and as_fraction(self.d_ns) != as_fraction(self.tau_ns)
            and not self.allow_delay_mismatch
        ):
            raise ValueError(
                f"{self.policy} is a clocked policy with d = tau; got d={self.d_ns}, tau={self.tau_ns} "
                "(set allow_delay_mismatch to override)"
            )

    def schedule(self, model: IsingModel) -> AnnealSchedule:
        lo = self.i0_min if self.i0_min is not None else 0.1 / model.sigma
        hi = self.i0_max if self.i0_max is not None else 10.0 / model.sigma
        return AnnealSchedule(lo, hi, self.t_total_ns)


@dataclass
class RunResult:
    final_cut: int
    normalized_cut: float
    final_energy: float
    trace_t: np.ndarray
    trace_e: np.ndarray
    applied_update_count: int
    config: RunConfig
    seed: int
    graph: str
    n: int
    initial_state: np.ndarray
    final_state: np.ndarray
    apply_log: tuple | None = None  # (apply_at, spins, values) arrays in landing order

    @property
    def energy_trace(self):
        return list(zip(self.trace_t.tolist(), self.trace_e.tolist()))

    @property
    def pbits_physical(self) -> int:
        return cost.physical_pbits(self.n, self.config.c)

    @property
    def cost_norm(self) -> float:
        return cost.reuse_cost_norm(self.config.c, self.config.bits)

    @property
    def d_tau_ratio(self) -> float:
        return cost.d_tau_ratio(self.config.d_ns, self.config.tau_ns)


def run(model: IsingModel, graph: WeightedGraph, config: RunConfig,
        entry: BenchmarkEntry | int, *, name=None, keep_log=False) -> RunResult:
    if graph.n != model.n:
        raise ValueError(f"model has {model.n} spins but graph has {graph.n} vertices")
    rng = np.random.default_rng(config.seed)
    init = SpinState.random(model.n, rng).values
    quant = Quantizer.for_model(model, config.bits)

    if config.t_total_ns == 0:
        state, tt, te, applied, log = init.copy(), [0.0], [energy(model, init)], 0, _empty_log()
    elif config.policy == GILLESPIE:
        state, tt, te, applied, log = _run_gillespie(model, config, quant, rng, init)
    elif config.policy == TICK_SEQUENTIAL:
        state, tt, te, applied, log = _run_sequential(model, config, quant, rng, init)
    else:
        state, tt, te, applied, log = _run_sync(model, config, quant, rng, init)

    tt, te = downsample(np.asarray(tt, dtype=np.float64), np.asarray(te, dtype=np.float64),
                        config.sample_cap)
    cut = cut_value(graph, state)
    if name is None:
        name = entry.name if isinstance(entry, BenchmarkEntry) else ""
    return RunResult(
        final_cut=cut,
        normalized_cut=normalized_cut(cut, entry),
        final_energy=energy(model, state),
        trace_t=tt,
        trace_e=te,
        applied_update_count=applied,
        config=config,
        seed=config.seed,
        graph=name,
        n=model.n,
        initial_state=init,
        final_state=state,
        apply_log=log if keep_log else None,
    )


def tick_times(tau_ns, t_total_ns) -> list[Fraction]:
    """Tick start times k*tau with k*tau < t_total, exact."""
    tau, horizon = as_fraction(tau_ns), as_fraction(t_total_ns)
    return [k * tau for k in range(math.ceil(horizon / tau))]


def _run_sync(model, config, quant, rng, init):
    indptr, indices, data = model.csr_arrays()
    h = model.biases
    sched = config.schedule(model)
    select = SELECTORS[config.policy]
    d = as_fraction(config.d_ns)
    horizon = as_fraction(config.t_total_ns)
    tl = Timeline(init)
    tt, te = [0.0], [energy(model, init)]
    applied = 0

    def land(t):
        nonlocal applied
        for apply_at, count in tl.advance(t):
            applied += count
            ta = float(apply_at)
            e = energy(model, tl.current)
            if tt[-1] == ta:
                te[-1] = e
            else:
                tt.append(ta)
                te.append(e)

    for t in tick_times(config.tau_ns, config.t_total_ns):
        land(t)
        sel = select(model.n, config.c, rng, float(t))
        idx = np.sort(sel.indices).astype(np.int64)
        u = 2.0 * rng.random(idx.size) - 1.0
        vals = kernels.tick_decide(indptr, indices, data, h, tl.current, idx, u,
                                   sched.i0(float(t)), quant.step, quant.limit)
        tl.schedule(t + d, idx, vals)
    land(horizon)
    log = _empty_log()
    if tl.log:
        log = (
            np.concatenate([np.full(len(s), float(a)) for a, _, s, _ in tl.log]),
            np.concatenate([s for _, _, s, _ in tl.log]).astype(np.int64),
            np.concatenate([v for _, _, _, v in tl.log]),
        )
    return tl.current.copy(), tt, te, applied, log


def _run_sequential(model, config, quant, rng, init):
    indptr, indices, data = model.csr_arrays()
    sched = config.schedule(model)
    ticks = tick_times(config.tau_ns, config.t_total_ns)
    i0s = np.array([sched.i0(float(t)) for t in ticks])
    u = 2.0 * rng.random((len(ticks), model.n)) - 1.0
    state = init.copy()
    energies = np.empty(len(ticks))
    kernels.sequential_sweeps(indptr, indices, data, model.biases, state, i0s, u,
                              quant.step, quant.limit, energy(model, init), energies,
                              np.zeros(0, dtype=np.int64), 0)
    tt = [float(t) for t in ticks]
    # writes are immediate; no delayed-apply log
    return state, tt, energies.tolist(), model.n * len(ticks), None


def gillespie_chunk(rate, t_total) -> int:
    return max(1024, int(rate * t_total * 1.05) + 64)


def draw_gillespie_events(rng, n, rate, t_total):
    """Event times, spins and uniforms until the first event past ``t_total``."""
    K = gillespie_chunk(rate, t_total)
    times, spins, us = [], [], []
    t0 = 0.0
    while True:
        w = rng.exponential(1.0 / rate, K)
        s = rng.integers(0, n, K)
        u = 2.0 * rng.random(K) - 1.0
        t = t0 + np.cumsum(w)
        times.append(t)
        spins.append(s)
        us.append(u)
        t0 = t[-1]
        if t0 > t_total:
            break
    times = np.concatenate(times)
    keep = int(np.searchsorted(times, t_total, side="right"))
    return times[:keep], np.concatenate(spins)[:keep].astype(np.int64), np.concatenate(us)[:keep]


def _run_gillespie(model, config, quant, rng, init):
    indptr, indices, data = model.csr_arrays()
    sched = config.schedule(model)
    rate = model.n * spin_rate(config.tau_ns, config.c)
    times, spins, u = draw_gillespie_events(rng, model.n, rate, config.t_total_ns)
    state = init.copy()
    K = times.size
    decisions = np.zeros(K, dtype=np.int8)
    trace_t = np.empty(K + 1)
    trace_e = np.empty(K + 1)
    trace_t[0], trace_e[0] = 0.0, energy(model, init)
    _, applied, ntr, _ = kernels.gillespie_events(
        indptr, indices, data, model.biases, state, times, spins, u,
        float(config.d_ns), float(config.t_total_ns), sched.i0_min, sched.i0_max,
        quant.step, quant.limit, trace_e[0], decisions, trace_t, trace_e, 1,
    )
    log = (times[:applied] + config.d_ns, spins[:applied], decisions[:applied])
    return state, trace_t[:ntr], trace_e[:ntr], applied, log


def _empty_log():
    return np.zeros(0), np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int8)


def replay_log(initial, log):
    """Final state obtained by landing ``log`` on ``initial`` in order."""
    s = np.array(initial, dtype=np.int8)
    _, spins, values = log
    for i, v in zip(spins.tolist(), values.tolist()):
        s[i] = v
    return s


def downsample(t, e, cap):
    """Keep at most ``cap`` points, evenly spaced by index, first and last included."""
    if t.size <= cap:
        return t, e
    idx = np.unique(np.round(np.linspace(0, t.size - 1, cap)).astype(np.int64))
    return t[idx], e[idx]


def with_seed(config: RunConfig, seed) -> RunConfig:
    return replace(config, seed=seed)
