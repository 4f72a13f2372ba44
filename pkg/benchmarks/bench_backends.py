"""Compiled vs pure-Python kernel timings on a G1-sized random graph.

    python benchmarks/bench_backends.py            # 800 spins, 500 ns
    python benchmarks/bench_backends.py --quick    # small smoke run

Both backends get identical inputs; the script also checks that they agree.
"""
import argparse
import time

import numpy as np

from pbitsim import kernels
from pbitsim.engine import draw_gillespie_events, spin_rate
from pbitsim.gset import WeightedGraph, to_ising
from pbitsim.ising import Quantizer, energy


def random_model(n, m, seed):
    rng = np.random.default_rng(seed)
    pairs = set()
    while len(pairs) < m:
        i, j = sorted(rng.integers(0, n, 2).tolist())
        if i != j:
            pairs.add((i, j))
    return to_ising(WeightedGraph(n, tuple((i, j, 1) for i, j in sorted(pairs))))


def cases(model, t_total, seed):
    rng = np.random.default_rng(seed)
    n = model.n
    csr = (*model.csr_arrays(), model.biases)
    q = Quantizer.for_model(model, 12)
    init = (2 * rng.integers(0, 2, n) - 1).astype(np.int8)
    e0 = energy(model, init)

    idx = np.arange(n, dtype=np.int64)
    u_tick = 2 * rng.random(n) - 1

    def tick(impl):
        return impl.tick_decide(*csr, init.copy(), idx, u_tick, 0.5, q.step, q.limit)

    rate = n * spin_rate(5.0, 1)
    times, spins, u_ev = draw_gillespie_events(rng, n, rate, t_total)

    def gillespie(impl):
        s = init.copy()
        K = times.size
        dec = np.zeros(K, dtype=np.int8)
        tt, te = np.empty(K + 1), np.empty(K + 1)
        tt[0], te[0] = 0.0, e0
        impl.gillespie_events(*csr, s, times, spins, u_ev, 5.0, t_total, 0.01, 1.5,
                              q.step, q.limit, e0, dec, tt, te, 1)
        return s

    sweeps = int(t_total / 5.0)
    i0s = np.linspace(0.01, 1.5, sweeps)
    u_seq = 2 * rng.random((sweeps, n)) - 1

    def sequential(impl):
        s = init.copy()
        impl.sequential_sweeps(*csr, s, i0s, u_seq, q.step, q.limit, e0, np.empty(sweeps),
                               np.zeros(0, dtype=np.int64), 0)
        return s

    return [
        (f"tick_decide ({n} spins, 1 tick)", tick),
        (f"gillespie_events ({times.size} events)", gillespie),
        (f"sequential_sweeps ({sweeps} sweeps)", sequential),
    ]


def best_of(fn, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--quick", action="store_true", help="100 spins, 50 ns")
    ap.add_argument("--repeats", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    n, m, t_total = (100, 600, 50.0) if args.quick else (800, 19176, 500.0)
    model = random_model(n, m, args.seed)
    py = kernels.backend("python")
    try:
        cy = kernels.backend("cython")
    except ImportError:
        cy = None
        print("compiled extension not built; timing the Python backend only")

    print(f"{'kernel':<40} {'python s':>10} {'cython s':>10} {'speedup':>9}")
    rows = []
    for label, fn in cases(model, t_total, args.seed):
        tp, out_p = best_of(lambda: fn(py), args.repeats)
        if cy is None:
            print(f"{label:<40} {tp:>10.4f} {'-':>10} {'-':>9}")
            continue
        tc, out_c = best_of(lambda: fn(cy), args.repeats)
        if not np.array_equal(out_p, out_c):
            raise SystemExit(f"{label}: backends disagree")
        print(f"{label:<40} {tp:>10.4f} {tc:>10.4f} {tp / tc:>8.1f}x")
        rows.append((label, tp, tc))
    return rows


if __name__ == "__main__":
    main()
