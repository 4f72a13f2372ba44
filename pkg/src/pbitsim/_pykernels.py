"""Pure-Python versions of the compiled kernels in ``_kernels.pyx``.

Same signatures, same loop order and the same floating point operations, so
both backends produce identical trajectories for integer-valued couplings.
"""
from __future__ import annotations

import math

import numpy as np

TANH_CLAMP = 30.0


def _quant(f, step, lim):
    y = (math.floor(f / step) + 0.5) * step
    if y > lim:
        return lim
    if y < -lim:
        return -lim
    return y


def _sample(qf, i0, u):
    x = i0 * qf
    if x > TANH_CLAMP:
        x = TANH_CLAMP
    elif x < -TANH_CLAMP:
        x = -TANH_CLAMP
    return 1 if u + math.tanh(x) >= 0.0 else -1


def _rows(indptr, indices, data):
    indptr = indptr.tolist()
    indices = indices.tolist()
    data = data.tolist()
    return [
        list(zip(indices[indptr[i]:indptr[i + 1]], data[indptr[i]:indptr[i + 1]]))
        for i in range(len(indptr) - 1)
    ]


def _field(row, hi, s):
    f = hi
    for j, w in row:
        f += w * s[j]
    return f


def tick_decide(indptr, indices, data, h, state, idx, u, i0, step, lim):
    hl = h.tolist()
    s = state.tolist()
    ip, ix, dt = indptr.tolist(), indices.tolist(), data.tolist()
    out = np.empty(len(idx), dtype=np.int8)
    for k, i in enumerate(idx.tolist()):
        f = hl[i]
        for p in range(ip[i], ip[i + 1]):
            f += dt[p] * s[ix[p]]
        out[k] = _sample(_quant(f, step, lim), i0, float(u[k]))
    return out


def gillespie_events(indptr, indices, data, h, state, times, spins, u, d, t_total,
                     i0_min, i0_max, step, lim, energy, decisions, trace_t, trace_e,
                     n_trace):
    rows = _rows(indptr, indices, data)
    hl = h.tolist()
    s = state.tolist()
    tl = times.tolist()
    sl = spins.tolist()
    ul = u.tolist()
    dec = [0] * len(tl)
    tt, te = [], []
    last_t = trace_t[n_trace - 1] if n_trace > 0 else None
    K = len(tl)
    k = a = n_applied = 0

    def apply(a, energy, last_t):
        tap = tl[a] + d
        i = sl[a]
        v = dec[a]
        if s[i] != v:
            f = _field(rows[i], hl[i], s)
            energy += 2.0 * s[i] * f
            s[i] = v
        if last_t is not None and last_t == tap:
            if te:
                te[-1] = energy
            else:
                trace_e[n_trace - 1] = energy
        else:
            tt.append(tap)
            te.append(energy)
            last_t = tap
        return energy, last_t

    while k < K and tl[k] <= t_total:
        t = tl[k]
        while a < k and tl[a] + d <= t:
            energy, last_t = apply(a, energy, last_t)
            n_applied += 1
            a += 1
        i = sl[k]
        i0 = i0_min + (i0_max - i0_min) * (t / t_total)
        f = _field(rows[i], hl[i], s)
        dec[k] = _sample(_quant(f, step, lim), i0, ul[k])
        k += 1
    while a < k and tl[a] + d <= t_total:
        energy, last_t = apply(a, energy, last_t)
        n_applied += 1
        a += 1

    state[:] = s
    decisions[:k] = dec[:k]
    ntr = n_trace + len(tt)
    trace_t[n_trace:ntr] = tt
    trace_e[n_trace:ntr] = te
    return k, n_applied, ntr, energy


def sequential_sweeps(indptr, indices, data, h, state, i0s, u, step, lim, energy,
                      energies, hist, burn_in):
    rows = _rows(indptr, indices, data)
    hl = h.tolist()
    s = state.tolist()
    n = len(s)
    track = len(hist) > 0
    for sw, i0 in enumerate(i0s.tolist()):
        us = u[sw].tolist()
        for i in range(n):
            f = _field(rows[i], hl[i], s)
            v = _sample(_quant(f, step, lim), i0, us[i])
            if v != s[i]:
                energy += 2.0 * s[i] * f
                s[i] = v
        energies[sw] = energy
        if track and sw >= burn_in:
            code = 0
            for i in range(n):
                if s[i] > 0:
                    code |= 1 << i
            hist[code] += 1
    state[:] = s
    return energy
