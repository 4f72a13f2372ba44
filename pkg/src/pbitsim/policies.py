"""Update policies: which spins sample when.

Synchronous selectors return a :class:`TickSelection` for one tick. The
asynchronous policy and the sequential baseline are also available here as
single-step reference routines; the engine runs their batched equivalents
in :mod:`pbitsim.kernels`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .ising import AnnealSchedule, IsingModel, Quantizer, local_field, pbit_sample

GILLESPIE = "gillespie"
TICK_RANDOM = "tick-random"
TICK_BLOCK = "tick-block-random"
TICK_STRIDE = "tick-block-random-stride"
TICK_SEQUENTIAL = "tick-sequential"

POLICIES = (GILLESPIE, TICK_RANDOM, TICK_BLOCK, TICK_STRIDE, TICK_SEQUENTIAL)
SYNC_POLICIES = (TICK_RANDOM, TICK_BLOCK, TICK_STRIDE)

STRIDE_MAX_DRAWS = 64


@dataclass(frozen=True)
class TickSelection:
    tick_time: float
    indices: np.ndarray
    start: int | None = None
    stride: int | None = None


def block_length(n, c) -> int:
    c = c if isinstance(c, Fraction) else Fraction(str(c))
    return math.ceil(Fraction(n) / c)


def tick_random_select(n, c, rng, tick_time=0.0) -> TickSelection:
    mask = rng.random(n) < 1.0 / float(c)
    return TickSelection(tick_time, np.flatnonzero(mask))


def tick_block_select(n, c, rng, tick_time=0.0, start=None) -> TickSelection:
    u = block_length(n, c)
    s = int(rng.integers(n)) if start is None else start
    return TickSelection(tick_time, (s + np.arange(u)) % n, start=s)


def draw_coprime_stride(n, rng) -> int:
    """Uniform on [1, n-1] redrawn until gcd(r, n) == 1; falls back to 1."""
    for _ in range(STRIDE_MAX_DRAWS):
        r = int(rng.integers(1, n))
        if math.gcd(r, n) == 1:
            return r
    return 1


def tick_block_stride_select(n, c, rng, tick_time=0.0, start=None, stride=None) -> TickSelection:
    if n < 2:
        raise ValueError("stride selection needs n >= 2")
    u = block_length(n, c)
    s = int(rng.integers(n)) if start is None else start
    r = draw_coprime_stride(n, rng) if stride is None else stride
    return TickSelection(tick_time, (s + np.arange(u, dtype=np.int64) * r) % n, start=s, stride=r)


SELECTORS = {
    TICK_RANDOM: tick_random_select,
    TICK_BLOCK: tick_block_select,
    TICK_STRIDE: tick_block_stride_select,
}


@dataclass
class GillespieContext:
    """Mutable state of a reference asynchronous run (see :func:`gillespie_step`)."""

    model: IsingModel
    timeline: object  # engine.Timeline
    schedule: AnnealSchedule
    quantizer: Quantizer
    rate: float
    d: float
    t: float = 0.0
    events: list = field(default_factory=list)


def gillespie_step(ctx: GillespieContext, rng):
    """Advance one event: Exp(rate) wait, uniform spin, decision applied after d.

    Draw order per event: waiting time, spin index, uniform.
    """
    t = ctx.t + rng.exponential(1.0 / ctx.rate)
    i = int(rng.integers(ctx.model.n))
    u = 2.0 * rng.random() - 1.0
    ctx.timeline.advance(t)
    f = ctx.quantizer(local_field(ctx.model, ctx.timeline.current, i))
    v = pbit_sample(f, ctx.schedule.i0(t), u)
    ctx.timeline.schedule(t + ctx.d, np.array([i]), np.array([v], dtype=np.int8))
    ctx.t = t
    ctx.events.append((t, i, v))
    return t, i, v


def sequential_sweep(model: IsingModel, values: np.ndarray, i0, quantizer: Quantizer, rng):
    """One in-place sweep, spins 0..N-1, each reading the already-updated state."""
    u = 2.0 * rng.random(model.n) - 1.0
    for i in range(model.n):
        f = quantizer(local_field(model, values, i))
        values[i] = pbit_sample(f, i0, u[i])
    return values

