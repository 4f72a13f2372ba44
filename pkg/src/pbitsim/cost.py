"""Abstract hardware cost: physical p-bits, DACs and their normalized cost."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

B_REF = 12


@dataclass(frozen=True)
class CostParams:
    alpha: float = 1.0
    beta: float = 1.0
    b_ref: int = B_REF

    def __post_init__(self):
        if self.alpha <= 0 or self.beta <= 0:
            raise ValueError("alpha and beta must be positive")
        if self.b_ref != B_REF:
            raise ValueError(f"b_ref is fixed at {B_REF}")


def _frac(c):
    # rational c avoids ceil(800 / 1.25) landing on the wrong side of an integer
    return c if isinstance(c, Fraction) else Fraction(str(c))


def physical_pbits(n, c) -> int:
    c = _frac(c)
    if c < 1:
        raise ValueError(f"reuse factor must be >= 1, got {c}")
    return math.ceil(Fraction(n) / c)


def hw_cost(n, c, b, params=CostParams()) -> float:
    """alpha * N_p + beta * (b / b_ref) * N_DAC with N_DAC = N_p."""
    if not 1 <= b <= params.b_ref:
        raise ValueError(f"DAC resolution must be in 1..{params.b_ref}, got {b}")
    n_p = physical_pbits(n, c)
    return params.alpha * n_p + params.beta * (b / params.b_ref) * n_p


def normalized_cost(n, c, b) -> float:
    """Cost relative to the fully parallel 12-bit design of the same size (alpha = beta = 1)."""
    return hw_cost(n, c, b) / hw_cost(n, 1, B_REF)


def reuse_cost_norm(c, b) -> float:
    """Size-independent normalized cost (1 + b/12) / (2c).

    Equals :func:`normalized_cost` whenever c divides n; this is the value
    reported in run records so that instances of different size share one
    cost axis.
    """
    c = _frac(c)
    if c < 1:
        raise ValueError(f"reuse factor must be >= 1, got {c}")
    if not 1 <= b <= B_REF:
        raise ValueError(f"DAC resolution must be in 1..{B_REF}, got {b}")
    return float((1 + Fraction(b, B_REF)) / (2 * c))


def d_tau_ratio(d_ns, tau_ns) -> float:
    if tau_ns <= 0:
        raise ValueError("tau must be positive")
    return d_ns / tau_ns
