import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pbitsim.ising import (
    AnnealSchedule,
    DegenerateModelError,
    IsingModel,
    Quantizer,
    SpinState,
    anneal_i0,
    coupling_sigma,
    energy,
    local_field,
    local_fields,
    pbit_sample,
    quantize,
)


def pair(j=1.0, h=(0.0, 0.0)):
    return IsingModel.from_edges(2, [(0, 1, j)], biases=np.array(h))


def triangle_af():
    return IsingModel.from_edges(3, [(0, 1, -1), (0, 2, -1), (1, 2, -1)])


def brute_energy(J, h, s):
    # direct double sum over ordered pairs
    n = len(s)
    e = 0.0
    for i in range(n):
        for j in range(n):
            e -= 0.5 * J[i][j] * s[i] * s[j]
        e -= h[i] * s[i]
    return e


def random_model(rng, n, density=0.6):
    J = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < density:
                J[i, j] = J[j, i] = rng.uniform(-1, 1)
    J[0, 1] = J[1, 0] = 0.5
    return IsingModel.from_dense(J, rng.uniform(-0.5, 0.5, n))


class TestModel:
    def test_rejects_asymmetric(self):
        with pytest.raises(ValueError, match="symmetric"):
            IsingModel.from_dense([[0, 1], [0, 0]])

    def test_rejects_diagonal(self):
        with pytest.raises(ValueError, match="diagonal"):
            IsingModel.from_dense([[1, 1], [1, 0]])

    def test_needs_two_spins(self):
        with pytest.raises(ValueError):
            IsingModel.from_dense([[0.0]])

    def test_spin_state_values(self):
        with pytest.raises(ValueError):
            SpinState(np.array([1, 0, -1]))


class TestEnergy:
    def test_single_ferro_bond(self):
        assert energy(pair(), SpinState(np.array([1, 1]))) == -1

    def test_antiferro_triangle_all_up(self):
        J = [[0, -1, -1], [-1, 0, -1], [-1, -1, 0]]
        assert brute_energy(J, [0, 0, 0], [1, 1, 1]) == 3
        assert energy(triangle_af(), np.array([1, 1, 1])) == 3

    def test_biases_cancel(self):
        m = IsingModel.from_edges(2, [], biases=np.array([1.0, -1.0]))
        assert energy(m, np.array([1, 1])) == 0

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            energy(pair(), np.array([1, 1, 1]))

    def test_matches_brute_force(self, rng):
        m = random_model(rng, 6)
        J = m.couplings.toarray()
        for _ in range(20):
            s = rng.choice([-1, 1], 6)
            assert energy(m, s) == pytest.approx(brute_energy(J, m.biases, s), abs=1e-12)


class TestLocalField:
    def test_pair(self):
        assert local_field(pair(), np.array([1, 1]), 0) == 1

    def test_triangle(self):
        assert local_field(triangle_af(), np.array([1, 1, 1]), 0) == -2

    def test_isolated_spin_bias(self):
        m = IsingModel.from_edges(3, [(1, 2, 1.0)], biases=np.array([0.5, 0, 0]))
        assert local_field(m, np.array([1, -1, 1]), 0) == 0.5

    def test_index_range(self):
        with pytest.raises(IndexError):
            local_field(pair(), np.array([1, 1]), 2)

    def test_vector_form(self, rng):
        m = random_model(rng, 7)
        s = rng.choice([-1, 1], 7)
        np.testing.assert_allclose(local_fields(m, s), [local_field(m, s, i) for i in range(7)])

    @settings(max_examples=50, deadline=None)
    @given(seed=st.integers(0, 2**32 - 1), n=st.integers(2, 9))
    def test_flip_changes_energy_by_twice_field(self, seed, n):
        r = np.random.default_rng(seed)
        m = random_model(r, n)
        s = r.choice([-1, 1], n)
        i = int(r.integers(n))
        before = energy(m, s)
        f = local_field(m, s, i)
        s2 = s.copy()
        s2[i] = -s2[i]
        assert energy(m, s2) - before == pytest.approx(2 * s[i] * f, abs=1e-9)


class TestSchedule:
    def test_endpoints(self):
        sched = AnnealSchedule(0.1 / 2.0, 10 / 2.0, 500.0)
        assert anneal_i0(sched, 0) == 0.05
        assert anneal_i0(sched, 500) == 5.0

    def test_midpoint(self):
        assert anneal_i0(AnnealSchedule(1, 3, 10), 5) == 2

    def test_default_bounds_from_sigma(self):
        m = pair()
        sched = AnnealSchedule.for_model(m, 100)
        assert sched.i0_min == pytest.approx(0.1 / 0.5)
        assert sched.i0_max == pytest.approx(10 / 0.5)

    def test_clamp_is_flagged(self):
        sched = AnnealSchedule(1, 3, 10)
        assert sched.i0_checked(12) == (3, True)
        assert sched.i0_checked(-1) == (1, True)
        assert sched.i0_checked(10) == (3, False)

    def test_invalid(self):
        with pytest.raises(ValueError):
            AnnealSchedule(0, 1, 10)
        with pytest.raises(ValueError):
            AnnealSchedule(2, 1, 10)
        with pytest.raises(ValueError):
            AnnealSchedule(1, 2, 0)

    @given(t1=st.floats(0, 100), t2=st.floats(0, 100))
    def test_affine(self, t1, t2):
        sched = AnnealSchedule(0.3, 7.0, 100.0)
        assert sched.i0(t1) + sched.i0(t2) == pytest.approx(2 * sched.i0((t1 + t2) / 2))


class TestQuantizer:
    def test_one_bit(self):
        q = Quantizer(1, 2.0)
        assert quantize(q, 0.7) == 1.0
        assert quantize(q, -0.7) == -1.0

    def test_twelve_bit_error(self):
        q = Quantizer(12, 2.0)
        assert q.step == pytest.approx(4 / 4096)
        assert abs(quantize(q, 0.5) - 0.5) <= q.step / 2

    def test_levels(self):
        for b in (1, 3, 6, 12):
            q = Quantizer(b, 3.0)
            xs = np.linspace(-5, 5, 200001)
            assert np.unique(quantize(q, xs)).size == 2**b
            assert q.levels == 2**b

    def test_saturation(self):
        q = Quantizer(3, 4.0)
        assert quantize(q, 100) == q.limit == 4 - 0.5
        assert quantize(q, -100) == -q.limit

    def test_idempotent(self):
        q = Quantizer(5, 3.0)
        y = quantize(q, np.linspace(-4, 4, 1001))
        np.testing.assert_array_equal(quantize(q, y), y)

    def test_bits_range(self):
        with pytest.raises(ValueError):
            Quantizer(0, 1.0)
        with pytest.raises(ValueError):
            Quantizer(13, 1.0)

    def test_full_scale_from_model(self):
        m = IsingModel.from_edges(3, [(0, 1, 2.0), (1, 2, -1.5)], biases=np.array([0.0, 0.25, 0.0]))
        assert m.full_scale() == 3.75

    @given(b=st.integers(1, 12), x1=st.floats(-10, 10), x2=st.floats(-10, 10))
    def test_monotone(self, b, x1, x2):
        q = Quantizer(b, 5.0)
        lo, hi = sorted((x1, x2))
        assert quantize(q, lo) <= quantize(q, hi)

    @given(b=st.integers(1, 12), frac=st.floats(-1, 1))
    def test_error_bound_inside_range(self, b, frac):
        q = Quantizer(b, 5.0)
        x = frac * q.limit
        assert abs(quantize(q, x) - x) <= q.step / 2 + 1e-12


class TestPbit:
    M = 100_000

    def _freq(self, x, seed=0):
        r = np.random.default_rng(seed)
        u = 2 * r.random(self.M) - 1
        return np.mean(pbit_sample(np.full(self.M, x), 1.0, u) == 1)

    def test_zero_field_is_fair(self):
        p = self._freq(0.0)
        assert abs(p - 0.5) <= 3 * math.sqrt(0.25 / self.M)

    def test_unit_argument(self):
        target = (1 + math.tanh(1)) / 2
        assert target == pytest.approx(0.8808, abs=1e-4)
        p = self._freq(1.0, seed=1)
        assert abs(p - target) <= 3 * math.sqrt(target * (1 - target) / self.M)

    def test_saturated(self):
        assert self._freq(50.0, seed=2) == 1.0
        assert self._freq(-50.0, seed=3) == 0.0

    def test_deterministic_given_u(self):
        assert pbit_sample(0.2, 1.0, -0.19) == 1
        assert pbit_sample(0.2, 1.0, -0.2) == -1  # tanh(0.2) < 0.2

    def test_huge_argument_does_not_overflow(self):
        with np.errstate(all="raise"):
            assert pbit_sample(1e308, 1e10, -0.999) == 1


class TestSigma:
    def test_pair(self):
        # entries {0, 1, 1, 0}: mean 0.5, var 0.25
        assert coupling_sigma(pair()) == pytest.approx(0.5)

    def test_scaling(self, rng):
        m = random_model(rng, 8)
        scaled = IsingModel(m.couplings * -3.0, m.biases)
        assert coupling_sigma(scaled) == pytest.approx(3 * coupling_sigma(m))

    def test_dense_variance(self, rng):
        m = random_model(rng, 9)
        dense = m.couplings.toarray()
        assert coupling_sigma(m) == pytest.approx(math.sqrt(8 * dense.var()))

    def test_degenerate(self):
        m = IsingModel.from_edges(3, [])
        with pytest.raises(DegenerateModelError, match="degenerate"):
            coupling_sigma(m)

    def test_cached(self):
        m = pair()
        assert m.sigma == m.sigma == 0.5
