import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_graph
from pbitsim.gset import WeightedGraph, cut_value, to_ising
from pbitsim.ising import IsingModel, energy
from pbitsim.metrics import (
    CostPoint,
    aggregate_mean_cut,
    all_energies,
    brute_force_boltzmann,
    brute_force_maxcut,
    instance_means,
    landscape_bins,
    oscillation_score,
    sample_sequential,
    state_code,
    total_variation,
)


class TestOscillation:
    def test_constant(self):
        assert oscillation_score([3.0] * 40) == 0.0

    def test_alternating(self):
        assert oscillation_score([0.0, 2.0] * 20) == 1.0

    def test_window_is_tail(self):
        trace = [100.0] * 20 + [0.0, 2.0] * 10
        assert oscillation_score(trace) == 1.0

    def test_pairs(self):
        assert oscillation_score([(t, (t % 2) * 2.0) for t in range(40)]) == 1.0

    def test_too_short(self):
        with pytest.raises(ValueError, match="at least 10"):
            oscillation_score([1.0] * 19)


class TestAggregate:
    def test_examples(self):
        assert aggregate_mean_cut([("G1", 0.9), ("G1", 1.0)]) == pytest.approx(0.95)
        assert aggregate_mean_cut([("a", 0.8), ("b", 1.0)]) == pytest.approx(0.9)
        assert aggregate_mean_cut([(f"G{k}", 1.0) for k in range(10)]) == 1.0

    def test_instances_weighted_equally(self):
        rows = [("a", 1.0)] * 3 + [("b", 0.0)] * 3
        assert aggregate_mean_cut(rows) == 0.5
        assert instance_means(rows) == {"a": 1.0, "b": 0.0}

    def test_empty(self):
        with pytest.raises(ValueError):
            aggregate_mean_cut([])


class TestLandscape:
    def test_single_bin(self):
        pts = [CostPoint(0.5, v) for v in (0.5, 0.9, 1.0)]
        assert landscape_bins(pts) == [(0.5, 0.9, 1.0)]

    def test_single_point(self):
        assert landscape_bins([CostPoint(0.3, 0.7)]) == [(0.3, 0.7, 0.7)]

    def test_two_far_points(self):
        out = landscape_bins([CostPoint(0.1, 0.4), CostPoint(0.9, 0.8)], 40)
        assert len(out) == 2
        assert out[0][1:] == (0.4, 0.4) and out[1][1:] == (0.8, 0.8)
        assert out[0][0] == pytest.approx(0.11) and out[1][0] == pytest.approx(0.89)

    def test_rejects_bad_points(self):
        with pytest.raises(ValueError):
            CostPoint(0.0, 0.5)
        with pytest.raises(ValueError):
            CostPoint(0.5, float("nan"))
        assert CostPoint(0.5, -0.1).cut_norm == -0.1
        with pytest.raises(ValueError):
            landscape_bins([])

    @settings(max_examples=50, deadline=None)
    @given(st.lists(st.tuples(st.floats(0.05, 1.0), st.floats(0, 1.2)), min_size=1, max_size=80),
           st.randoms())
    def test_permutation_invariant(self, raw, rnd):
        pts = [CostPoint(c, v) for c, v in raw]
        shuffled = pts[:]
        rnd.shuffle(shuffled)
        a, b = landscape_bins(pts), landscape_bins(shuffled)
        assert a == b
        assert len(a) <= 40
        for _, med, mx in a:
            assert med <= mx


class TestMaxcutOracle:
    def test_small_graphs(self):
        tri = WeightedGraph(3, ((0, 1, 1), (0, 2, 1), (1, 2, 1)))
        assert brute_force_maxcut(tri)[0] == 2
        assert brute_force_maxcut(WeightedGraph(2, ((0, 1, 1),)))[0] == 1
        c4 = WeightedGraph(4, ((0, 1, 1), (1, 2, 1), (2, 3, 1), (0, 3, 1)))
        assert brute_force_maxcut(c4)[0] == 4

    @pytest.mark.parametrize("seed", range(5))
    def test_matches_itertools(self, seed):
        rng = np.random.default_rng(seed)
        g = random_graph(9, 20, rng, signed=True)
        best = max(cut_value(g, np.array(s)) for s in itertools.product([-1, 1], repeat=9))
        got, witness = brute_force_maxcut(g)
        assert got == best == cut_value(g, witness)
        assert witness[0] == 1

    def test_size_limit(self):
        with pytest.raises(ValueError):
            brute_force_maxcut(WeightedGraph(25, ((0, 1, 1),)))


class TestBoltzmann:
    def test_uniform_at_zero_gain(self):
        m = IsingModel.from_edges(4, [(0, 1, 1.0), (2, 3, -2.0)])
        np.testing.assert_allclose(brute_force_boltzmann(m, 0.0), np.full(16, 1 / 16))

    def test_single_spin_marginal(self):
        # spin 0 is isolated with h = 1; its marginal is the p-bit law itself
        m = IsingModel.from_edges(2, [], biases=np.array([1.0, 0.0]))
        for i0 in (0.1, 0.7, 2.0):
            p = brute_force_boltzmann(m, i0)
            p_up = sum(p[k] for k in range(4) if k & 1)
            assert p_up == pytest.approx((1 + math.tanh(i0)) / 2)

    def test_ferromagnet_concentrates(self):
        m = IsingModel.from_edges(2, [(0, 1, 1.0)])
        p = brute_force_boltzmann(m, 10.0)
        assert p[0] == pytest.approx(p[3])
        assert p[0] + p[3] > 0.999

    def test_energies_match_direct(self, rng):
        m = to_ising(random_graph(6, 10, rng, signed=True))
        e = all_energies(m)
        for code in (0, 5, 37, 63):
            s = np.array([1 if code >> i & 1 else -1 for i in range(6)])
            assert e[code] == energy(m, s)
            assert state_code(s) == code

    def test_sequential_sampler_is_boltzmann(self):
        rng = np.random.default_rng(2)
        n = 4
        J = np.triu(rng.uniform(-1, 1, (n, n)), 1)
        m = IsingModel.from_dense(J + J.T, rng.uniform(-0.5, 0.5, n))
        emp = sample_sequential(m, 0.7, 40_000, burn_in=500, seed=1)
        assert total_variation(emp, brute_force_boltzmann(m, 0.7)) < 0.02
        # the doubled exponent is a different law for this model
        wrong = brute_force_boltzmann(m, 1.4)
        assert total_variation(emp, wrong) > 0.05

    def test_total_variation(self):
        assert total_variation([0.5, 0.5], [1.0, 0.0]) == 0.5
