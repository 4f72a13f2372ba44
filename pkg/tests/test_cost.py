from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from pbitsim.cost import (
    CostParams,
    d_tau_ratio,
    hw_cost,
    normalized_cost,
    physical_pbits,
    reuse_cost_norm,
)

# (c, b) -> reference normalized cost
TABLE_COSTS = [
    (1, 6, 0.7500),
    (3, 3, 0.2083),
    (3, 10, 0.3056),
    (1, 3, 0.6250),
    (1, 12, 1.0000),
    (1, 10, 0.9167),
    (1, 4, 0.6667),
    (3, 4, 0.2222),
]


def test_physical_pbits():
    assert physical_pbits(800, 3) == 267
    assert physical_pbits(800, 1) == 800
    assert physical_pbits(2000, 30) == 67
    assert physical_pbits(800, 1.25) == 640
    assert physical_pbits(10, Fraction(3, 2)) == 7


def test_physical_pbits_rejects_c_below_one():
    with pytest.raises(ValueError):
        physical_pbits(10, 0.5)


def test_hw_cost_full_parallel():
    assert hw_cost(100, 1, 12) == 200


def test_hw_cost_halved_bits():
    assert hw_cost(100, 1, 6) / hw_cost(100, 1, 12) == 0.75


def test_hw_cost_reuse_and_bits():
    assert hw_cost(99, 3, 3) / hw_cost(99, 1, 12) == pytest.approx(0.2083, abs=5e-5)


def test_hw_cost_weights():
    assert hw_cost(12, 1, 6, CostParams(alpha=2.0, beta=4.0)) == 2 * 12 + 4 * 0.5 * 12
    with pytest.raises(ValueError):
        CostParams(alpha=0)
    with pytest.raises(ValueError):
        hw_cost(12, 1, 13)


@pytest.mark.parametrize("c,b,expected", TABLE_COSTS)
def test_table_costs(c, b, expected):
    n = 1200  # divisible by every c used
    assert round(normalized_cost(n, c, b), 4) == expected
    assert round(reuse_cost_norm(c, b), 4) == expected


def test_reuse_cost_ignores_ceiling():
    # 800 is not divisible by 3: the ceiling makes the sized cost slightly larger
    assert normalized_cost(800, 3, 10) == pytest.approx(267 / 800 * (1 + 10 / 12) / 2)
    assert round(reuse_cost_norm(3, 10), 6) == 0.305556


def test_d_tau():
    assert d_tau_ratio(5, 5) == 1.0
    assert d_tau_ratio(5, 20) == 0.25
    assert d_tau_ratio(5, 7.5) == pytest.approx(2 / 3)
    with pytest.raises(ValueError):
        d_tau_ratio(5, 0)


CS = [1, 1.25, 1.5, 2, 3, 5, 10, 15, 20, 30]


@given(n=st.integers(1, 5000), b=st.integers(1, 12))
def test_monotone_in_c(n, b):
    costs = [normalized_cost(n, c, b) for c in CS]
    assert all(x >= y for x, y in zip(costs, costs[1:]))


@given(n=st.integers(1, 5000), c=st.sampled_from(CS))
def test_strictly_increasing_in_b(n, c):
    costs = [normalized_cost(n, c, b) for b in range(1, 13)]
    assert all(x < y for x, y in zip(costs, costs[1:]))


@given(k1=st.integers(1, 200), k2=st.integers(1, 200), c=st.sampled_from([1, 2, 3, 5, 10, 15, 20, 30]),
       b=st.integers(1, 12))
def test_size_independent_when_divisible(k1, k2, c, b):
    assert normalized_cost(k1 * c, c, b) == pytest.approx(normalized_cost(k2 * c, c, b))
