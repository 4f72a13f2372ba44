# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled inner loops. Signatures and loop order mirror _pykernels."""

from libc.math cimport floor, tanh

import numpy as np

cdef double TANH_CLAMP = 30.0


cdef inline double _quant(double f, double step, double lim) nogil:
    cdef double y = (floor(f / step) + 0.5) * step
    if y > lim:
        return lim
    if y < -lim:
        return -lim
    return y


cdef inline signed char _sample(double qf, double i0, double u) nogil:
    cdef double x = i0 * qf
    if x > TANH_CLAMP:
        x = TANH_CLAMP
    elif x < -TANH_CLAMP:
        x = -TANH_CLAMP
    if u + tanh(x) >= 0.0:
        return 1
    return -1


cdef inline double _field(const long long[:] indptr, const long long[:] indices,
                          const double[:] data, const double[:] h,
                          const signed char[:] state, long long i) nogil:
    cdef double f = h[i]
    cdef long long p
    for p in range(indptr[i], indptr[i + 1]):
        f += data[p] * state[indices[p]]
    return f


def tick_decide(const long long[:] indptr, const long long[:] indices,
                const double[:] data, const double[:] h,
                const signed char[:] state, const long long[:] idx,
                const double[:] u, double i0, double step, double lim):
    cdef Py_ssize_t k, m = idx.shape[0]
    out = np.empty(m, dtype=np.int8)
    cdef signed char[:] o = out
    cdef double f
    with nogil:
        for k in range(m):
            f = _field(indptr, indices, data, h, state, idx[k])
            o[k] = _sample(_quant(f, step, lim), i0, u[k])
    return out


def gillespie_events(const long long[:] indptr, const long long[:] indices,
                     const double[:] data, const double[:] h,
                     signed char[:] state, const double[:] times,
                     const long long[:] spins, const double[:] u,
                     double d, double t_total, double i0_min, double i0_max,
                     double step, double lim, double energy,
                     signed char[:] decisions, double[:] trace_t, double[:] trace_e,
                     Py_ssize_t n_trace):
    cdef Py_ssize_t K = times.shape[0]
    cdef Py_ssize_t k = 0, a = 0, n_applied = 0, ntr = n_trace
    cdef double t, tap, f, i0
    cdef long long i
    cdef signed char v
    with nogil:
        while k < K and times[k] <= t_total:
            t = times[k]
            while a < k and times[a] + d <= t:
                tap = times[a] + d
                i = spins[a]
                v = decisions[a]
                if state[i] != v:
                    f = _field(indptr, indices, data, h, state, i)
                    energy += 2.0 * state[i] * f
                    state[i] = v
                n_applied += 1
                if ntr > 0 and trace_t[ntr - 1] == tap:
                    trace_e[ntr - 1] = energy
                else:
                    trace_t[ntr] = tap
                    trace_e[ntr] = energy
                    ntr += 1
                a += 1
            i = spins[k]
            i0 = i0_min + (i0_max - i0_min) * (t / t_total)
            f = _field(indptr, indices, data, h, state, i)
            decisions[k] = _sample(_quant(f, step, lim), i0, u[k])
            k += 1
        while a < k and times[a] + d <= t_total:
            tap = times[a] + d
            i = spins[a]
            v = decisions[a]
            if state[i] != v:
                f = _field(indptr, indices, data, h, state, i)
                energy += 2.0 * state[i] * f
                state[i] = v
            n_applied += 1
            if ntr > 0 and trace_t[ntr - 1] == tap:
                trace_e[ntr - 1] = energy
            else:
                trace_t[ntr] = tap
                trace_e[ntr] = energy
                ntr += 1
            a += 1
    return k, n_applied, ntr, energy


def sequential_sweeps(const long long[:] indptr, const long long[:] indices,
                      const double[:] data, const double[:] h,
                      signed char[:] state, const double[:] i0s,
                      const double[:, :] u, double step, double lim,
                      double energy, double[:] energies,
                      long long[:] hist, Py_ssize_t burn_in):
    cdef Py_ssize_t s, S = i0s.shape[0]
    cdef Py_ssize_t n = state.shape[0]
    cdef Py_ssize_t i
    cdef double f, i0
    cdef signed char v
    cdef long long code
    cdef bint track = hist.shape[0] > 0
    with nogil:
        for s in range(S):
            i0 = i0s[s]
            for i in range(n):
                f = _field(indptr, indices, data, h, state, i)
                v = _sample(_quant(f, step, lim), i0, u[s, i])
                if v != state[i]:
                    energy += 2.0 * state[i] * f
                    state[i] = v
            energies[s] = energy
            if track and s >= burn_in:
                code = 0
                for i in range(n):
                    if state[i] > 0:
                        code |= (<long long>1) << i
                hist[code] += 1
    return energy
