"""Cartesian parameter sweeps, deterministic CSV records and summaries.

Spec files are line-oriented ``key = value`` text; list values are comma
separated and ``#`` starts a comment. A ``[name]`` header opens a new section
that inherits every key set before it; each section is its own Cartesian
product and sections run in file order. Run ``k`` of the whole enumeration
(instance-major, then policy, tau, c, b, repeat) gets seed ``base_seed + k``.
"""
from __future__ import annotations

import csv
import io
import itertools
from collections import defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from importlib import resources
from pathlib import Path

from .engine import RunConfig, as_fraction, run
from .gset import BenchmarkEntry, UnknownBenchmarkError, load_graph, lookup, to_ising
from .metrics import CostPoint, instance_means, landscape_bins
from .policies import GILLESPIE, POLICIES, TICK_BLOCK, TICK_RANDOM, TICK_STRIDE

CSV_COLUMNS = (
    "run_id", "graph", "policy", "tau_ns", "c", "b", "d_ns", "time_ns", "seed",
    "final_cut", "normalized_cut", "final_energy", "pbits_physical", "cost_norm",
    "d_tau_ratio", "applied_updates",
)
TRACE_COLUMNS = ("run_id", "t_ns", "energy")
LANDSCAPE_COLUMNS = ("bin_center_cost", "median_cut_norm", "max_cut_norm", "policy_filter")
SUMMARY_COLUMNS = (
    "policy", "tau_ns", "c", "b", "d_ns", "time_ns", "cost_norm", "mean_cut_norm",
    "min_instance_cut_norm", "max_instance_cut_norm", "instances", "runs",
)

POLICY_GROUPS = {
    "all": set(POLICIES),
    "async": {GILLESPIE},
    "structured-sync": {TICK_BLOCK, TICK_STRIDE},
    "random-sync": {TICK_RANDOM},
}

SEED_MOD = 1 << 64

_KEYS = {
    "policies": "policies", "policy": "policies",
    "taus_ns": "taus_ns", "tau_ns": "taus_ns", "tau": "taus_ns",
    "cs": "cs", "c": "cs",
    "bits_list": "bits_list", "bits": "bits_list", "b": "bits_list",
    "instances": "instances", "graphs": "instances", "graph": "instances",
    "repeats": "repeats",
    "base_seed": "base_seed", "seed": "base_seed",
    "t_total_ns": "t_total_ns", "time_ns": "t_total_ns", "time": "t_total_ns",
    "d_ns": "d_ns", "d": "d_ns",
    "allow_delay_mismatch": "allow_delay_mismatch",
    "targets": "targets",
}


class SpecError(ValueError):
    pass


class SweepError(RuntimeError):
    pass


@dataclass(frozen=True)
class SweepSpec:
    policies: tuple
    taus_ns: tuple
    cs: tuple
    bits_list: tuple
    instances: tuple
    repeats: int = 1
    base_seed: int = 0
    t_total_ns: float = 500.0
    d_ns: float = 5.0
    allow_delay_mismatch: bool = False
    targets: dict = field(default_factory=dict)  # extra name -> best-known cut
    name: str = ""

    def __post_init__(self):
        for key in ("policies", "taus_ns", "cs", "bits_list", "instances"):
            if not getattr(self, key):
                raise SpecError(f"{key} must not be empty")
        if self.repeats < 1:
            raise SpecError("repeats must be >= 1")
        for p in self.policies:
            if p not in POLICIES:
                raise SpecError(f"unknown policy {p!r}")

    @property
    def size(self) -> int:
        return (len(self.instances) * len(self.policies) * len(self.taus_ns)
                * len(self.cs) * len(self.bits_list) * self.repeats)


@dataclass(frozen=True)
class Job:
    run_id: int
    instance: str
    target: int
    config: RunConfig


def _parse_value(key, raw):
    items = [t.strip() for t in raw.split(",") if t.strip()]
    try:
        if key == "policies" or key == "instances":
            return tuple(items)
        if key == "taus_ns":
            return tuple(float(t) for t in items)
        if key == "cs":
            return tuple(Fraction(t) for t in items)
        if key == "bits_list":
            return tuple(int(t) for t in items)
        if key in ("repeats", "base_seed"):
            return int(raw)
        if key in ("t_total_ns", "d_ns"):
            return float(raw)
        if key == "allow_delay_mismatch":
            if raw.strip().lower() not in ("true", "false", "1", "0", "yes", "no"):
                raise ValueError(raw)
            return raw.strip().lower() in ("true", "1", "yes")
        if key == "targets":
            out = {}
            for t in items:
                name, val = t.split(":")
                out[name.strip()] = int(val)
            return out
    except ValueError as exc:
        raise SpecError(f"bad value for {key}: {raw!r}") from exc
    raise SpecError(f"unknown key {key!r}")


def parse_spec(text) -> list[SweepSpec]:
    """Parse spec-file text into one :class:`SweepSpec` per section."""
    sections = []
    current = {}
    name = ""
    started = False

    def close():
        if started or current:
            sections.append(_build(dict(current), name))

    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            if started:
                close()
            started = True
            name = line[1:-1].strip()
            continue
        if "=" not in line:
            raise SpecError(f"line {lineno}: expected 'key = value'")
        key, raw = (s.strip() for s in line.split("=", 1))
        if key not in _KEYS:
            raise SpecError(f"line {lineno}: unknown key {key!r}")
        current[_KEYS[key]] = _parse_value(_KEYS[key], raw)
    close()
    if not sections:
        raise SpecError("empty spec")
    return sections


def _build(values, name):
    missing = [k for k in ("policies", "taus_ns", "cs", "bits_list", "instances") if k not in values]
    if missing:
        raise SpecError(f"section {name or '(top)'}: missing {', '.join(missing)}")
    return SweepSpec(name=name, **values)


def recipe_names() -> list[str]:
    files = resources.files("pbitsim").joinpath("recipes")
    return sorted(p.name[:-5] for p in files.iterdir() if p.name.endswith(".spec"))


def load_spec(path_or_name) -> list[SweepSpec]:
    p = Path(path_or_name)
    if p.is_file():
        return parse_spec(p.read_text())
    res = resources.files("pbitsim").joinpath("recipes", f"{path_or_name}.spec")
    if res.is_file():
        return parse_spec(res.read_text())
    raise SpecError(f"no spec file or recipe named {path_or_name!r} (recipes: {', '.join(recipe_names())})")


def resolve_target(name, spec: SweepSpec | None = None) -> int:
    if spec is not None and name in spec.targets:
        return spec.targets[name]
    return lookup(name).target


def enumerate_jobs(specs) -> list[Job]:
    jobs = []
    k = 0
    for spec in specs:
        for inst in spec.instances:
            target = resolve_target(inst, spec)
            for pol, tau, c, b, _ in itertools.product(
                spec.policies, spec.taus_ns, spec.cs, spec.bits_list, range(spec.repeats)
            ):
                try:
                    cfg = RunConfig(
                        policy=pol, tau_ns=tau, c=c, bits=b, d_ns=spec.d_ns,
                        t_total_ns=spec.t_total_ns, seed=(spec.base_seed + k) % SEED_MOD,
                        allow_delay_mismatch=spec.allow_delay_mismatch,
                    )
                except ValueError as exc:
                    raise SpecError(f"section {spec.name or '(top)'}: {inst} {pol} tau={tau} c={c} b={b}: {exc}") from exc
                jobs.append(Job(k, inst, target, cfg))
                k += 1
    return jobs


@lru_cache(maxsize=16)
def _instance(name, graph_dir, n, m, target):
    graph = load_graph(name, graph_dir, BenchmarkEntry(name, n, m, target) if n else None)
    return graph, to_ising(graph)


def _registry_shape(name):
    try:
        e = lookup(name)
        return e.n, e.m
    except UnknownBenchmarkError:
        return 0, 0


def execute_job(job: Job, graph_dir=None, keep_trace=False):
    graph, model = _instance(job.instance, graph_dir, *_registry_shape(job.instance), job.target)
    res = run(model, graph, job.config, job.target, name=job.instance)
    rec = record(job.run_id, res)
    trace = list(zip(res.trace_t.tolist(), res.trace_e.tolist())) if keep_trace else None
    return rec, trace


def _execute_packed(args):
    job, graph_dir, keep_trace = args
    try:
        return execute_job(job, graph_dir, keep_trace)
    except Exception as exc:  # surfaced with the failing configuration
        return SweepError(f"run {job.run_id} failed ({describe(job)}): {exc}")


def describe(job: Job) -> str:
    c = job.config
    return (f"graph={job.instance} policy={c.policy} tau={c.tau_ns:g} c={float(c.c):g} "
            f"b={c.bits} d={c.d_ns:g} time={c.t_total_ns:g} seed={c.seed}")


def run_jobs(jobs, graph_dir=None, jobs_n=1, keep_trace=False):
    """Run every job; results come back in run_id order whatever the worker count."""
    packed = [(j, graph_dir, keep_trace) for j in jobs]
    if jobs_n <= 1 or len(jobs) <= 1:
        results = map(_execute_packed, packed)
        out = []
        for r in results:
            if isinstance(r, SweepError):
                raise r
            out.append(r)
        return out
    with ProcessPoolExecutor(max_workers=jobs_n) as pool:
        out = list(pool.map(_execute_packed, packed, chunksize=max(1, len(packed) // (8 * jobs_n))))
    for r in out:
        if isinstance(r, SweepError):
            raise r
    return out


def record(run_id, res) -> dict:
    c = res.config
    return {
        "run_id": run_id,
        "graph": res.graph,
        "policy": c.policy,
        "tau_ns": float(c.tau_ns),
        "c": float(c.c),
        "b": c.bits,
        "d_ns": float(c.d_ns),
        "time_ns": float(c.t_total_ns),
        "seed": c.seed,
        "final_cut": res.final_cut,
        "normalized_cut": res.normalized_cut,
        "final_energy": res.final_energy,
        "pbits_physical": res.pbits_physical,
        "cost_norm": res.cost_norm,
        "d_tau_ratio": res.d_tau_ratio,
        "applied_updates": res.applied_update_count,
    }


def _fmt(v):
    if isinstance(v, float):
        s = f"{v:.6f}"
        return "0.000000" if s == "-0.000000" else s
    return str(v)


def write_csv(rows, columns, fh):
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_fmt(r[k]) for k in columns])


def records_csv(records) -> str:
    buf = io.StringIO()
    write_csv(records, CSV_COLUMNS, buf)
    return buf.getvalue()


def traces_csv(pairs) -> str:
    """``pairs`` is ``[(run_id, [(t, H), ...]), ...]``."""
    rows = [{"run_id": rid, "t_ns": t, "energy": e} for rid, tr in pairs for t, e in tr]
    buf = io.StringIO()
    write_csv(rows, TRACE_COLUMNS, buf)
    return buf.getvalue()


def read_records(fh, required=("policy", "cost_norm", "normalized_cut")) -> list[dict]:
    reader = csv.DictReader(fh)
    cols = reader.fieldnames or []
    for col in required:
        if col not in cols:
            raise SpecError(f"input is missing column {col!r}")
    rows = list(reader)
    if not rows:
        raise SpecError("input has no records")
    return rows


_CONFIG_KEYS = ("policy", "tau_ns", "c", "b", "d_ns", "time_ns")


def _config_key(row):
    return tuple(row.get(k, "") for k in _CONFIG_KEYS)


def summarize(rows) -> list[dict]:
    """Mean normalized cut per configuration: per-instance mean over repeats, then over instances."""
    groups = defaultdict(list)
    firsts = {}
    for r in rows:
        key = _config_key(r)
        firsts.setdefault(key, r)
        groups[key].append((r.get("graph", ""), float(r["normalized_cut"])))
    out = []
    for key, vals in groups.items():
        means = instance_means(vals)
        row = dict(zip(_CONFIG_KEYS, key))
        first = firsts[key]
        row.update(
            cost_norm=float(first["cost_norm"]),
            mean_cut_norm=sum(means.values()) / len(means),
            min_instance_cut_norm=min(means.values()),
            max_instance_cut_norm=max(means.values()),
            instances=len(means),
            runs=len(vals),
        )
        out.append(row)
    return out


def best_per_policy(summary, max_bits=None, tau=None) -> list[dict]:
    best = {}
    for row in summary:
        if max_bits is not None and int(row["b"]) > max_bits:
            continue
        if tau is not None and float(row["tau_ns"]) != tau:
            continue
        pol = row["policy"]
        if pol not in best or row["mean_cut_norm"] > best[pol]["mean_cut_norm"]:
            best[pol] = row
    return [best[p] for p in POLICIES if p in best]


def landscape(rows, n_bins=40) -> list[dict]:
    """Per-configuration mean cuts binned by normalized cost, for each policy group."""
    summary = summarize(rows)
    out = []
    for group, members in POLICY_GROUPS.items():
        pts = [
            CostPoint(s["cost_norm"], s["mean_cut_norm"], s["policy"])
            for s in summary if s["policy"] in members
        ]
        if not pts:
            continue
        for center, med, mx in landscape_bins(pts, n_bins):
            out.append({"bin_center_cost": center, "median_cut_norm": med,
                        "max_cut_norm": mx, "policy_filter": group})
    return out


def spec_from_flags(policies, taus, cs, bits, instances, repeats=1, base_seed=0,
                    t_total_ns=500.0, d_ns=5.0, allow_delay_mismatch=False, targets=None):
    return SweepSpec(
        policies=tuple(policies), taus_ns=tuple(float(t) for t in taus),
        cs=tuple(as_fraction(c) for c in cs), bits_list=tuple(int(b) for b in bits),
        instances=tuple(instances), repeats=repeats, base_seed=base_seed,
        t_total_ns=t_total_ns, d_ns=d_ns, allow_delay_mismatch=allow_delay_mismatch,
        targets=dict(targets or {}),
    )
