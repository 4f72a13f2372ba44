"""Parallel p-bit Ising annealing: update policies, delayed applies, reuse and DAC cost."""
from .cost import CostParams, d_tau_ratio, hw_cost, normalized_cost, physical_pbits, reuse_cost_norm
from .engine import RunConfig, RunResult, Timeline, run, spin_rate
from .gset import (
    BenchmarkEntry,
    WeightedGraph,
    cut_value,
    load_graph,
    lookup,
    normalized_cut,
    parse_gset,
    registry,
    to_ising,
)
from .ising import (
    AnnealSchedule,
    IsingModel,
    Quantizer,
    SpinState,
    anneal_i0,
    coupling_sigma,
    energy,
    local_field,
    pbit_sample,
    quantize,
)
from .kernels import BACKEND

__version__ = "0.1.0"
