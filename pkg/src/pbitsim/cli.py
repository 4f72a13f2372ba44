"""Command line: ``pbitsim {run,sweep,landscape,summary,graphs,recipes}``."""
from __future__ import annotations

import argparse
import contextlib
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import sweep
from .gset import GRAPH_DIR_ENV, UnknownBenchmarkError, lookup, registry
from .policies import POLICIES, SYNC_POLICIES

EXIT_USAGE = 2
EXIT_FAILURE = 1


class CliError(Exception):
    def __init__(self, msg, code=EXIT_USAGE):
        super().__init__(msg)
        self.code = code


def _list(conv):
    def parse(text):
        try:
            return [conv(t.strip()) for t in text.split(",") if t.strip()]
        except ValueError as exc:
            raise argparse.ArgumentTypeError(str(exc)) from None
    return parse


def _open_out(path):
    if path in (None, "-"):
        return contextlib.nullcontext(sys.stdout)
    return open(path, "w", newline="")


def _add_common(p):
    p.add_argument("--graph-dir", help=f"directory holding G-set files (default: ${GRAPH_DIR_ENV})")
    p.add_argument("--d", type=float, default=5.0, help="apply delay in ns (default 5)")
    p.add_argument("--time", type=float, default=500.0, help="total annealing time in ns (default 500)")
    p.add_argument("--seed", type=int, default=0, help="run seed / sweep base seed")
    p.add_argument("--repeats", type=int, default=1)
    p.add_argument("--out", help="output path (default stdout)")
    p.add_argument("--allow-delay-mismatch", action="store_true",
                   help="permit d != tau for the clocked tick policies")
    p.add_argument("--trace-out", help="also write energy traces (run_id,t_ns,energy) here")
    p.add_argument("--target", type=int, help="best-known cut for a graph outside the registry")


def build_parser():
    ap = argparse.ArgumentParser(prog="pbitsim", description=__doc__)
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("run", help="one annealing run, one record per repeat")
    p.add_argument("--graph", required=True)
    p.add_argument("--policy", choices=POLICIES, default="tick-random")
    p.add_argument("--tau", type=float, default=5.0)
    p.add_argument("--c", type=Fraction, default=Fraction(1))
    p.add_argument("--b", type=int, default=12)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    _add_common(p)

    p = sub.add_parser("sweep", help="Cartesian sweep from a spec file, recipe name or flags")
    p.add_argument("--spec", help="spec file path or shipped recipe name")
    p.add_argument("--graph", type=_list(str), help="comma-separated instances")
    p.add_argument("--policy", type=_list(str))
    p.add_argument("--tau", type=_list(float))
    p.add_argument("--c", type=_list(Fraction))
    p.add_argument("--b", type=_list(int))
    p.add_argument("--jobs", type=int, default=1, help="worker processes")
    _add_common(p)

    p = sub.add_parser("landscape", help="bin sweep records by normalized cost")
    p.add_argument("results", help="sweep CSV ('-' for stdin)")
    p.add_argument("--bins", type=int, default=40)
    p.add_argument("--out")

    p = sub.add_parser("summary", help="mean normalized cut per configuration")
    p.add_argument("results", help="sweep CSV ('-' for stdin)")
    p.add_argument("--best", action="store_true", help="best configuration per policy only")
    p.add_argument("--max-bits", type=int, help="restrict to b <= MAX_BITS")
    p.add_argument("--tau", type=float, help="restrict to one update interval")
    p.add_argument("--out")

    sub.add_parser("graphs", help="list the benchmark registry")
    sub.add_parser("recipes", help="list shipped sweep recipes")
    return ap


def _check_delay(policies, taus, d, allow):
    if allow:
        return
    for pol in policies:
        if pol in SYNC_POLICIES:
            for tau in taus:
                if Fraction(str(tau)) != Fraction(str(d)):
                    raise CliError(
                        f"{pol} runs a clocked design with d = tau; got --d {d:g} and --tau {tau:g} "
                        "(pass --allow-delay-mismatch to override)"
                    )


def _targets(names, target):
    out = {}
    for name in names:
        try:
            lookup(name)
        except UnknownBenchmarkError:
            if target is None:
                raise CliError(f"unknown benchmark: {name}") from None
            out[name] = target
    return out


def cmd_run(args):
    _check_delay([args.policy], [args.tau], args.d, args.allow_delay_mismatch)
    spec = sweep.spec_from_flags(
        [args.policy], [args.tau], [args.c], [args.b], [args.graph], repeats=args.repeats,
        base_seed=args.seed, t_total_ns=args.time, d_ns=args.d,
        allow_delay_mismatch=args.allow_delay_mismatch, targets=_targets([args.graph], args.target),
    )
    results = _execute([spec], args.graph_dir, 1, args.trace_out is not None)
    recs = [r for r, _ in results]
    with _open_out(args.out) as fh:
        if args.format == "json":
            payload = recs[0] if len(recs) == 1 else recs
            fh.write(json.dumps(payload, indent=2) + "\n")
        else:
            fh.write(sweep.records_csv(recs))
    _write_traces(args.trace_out, results)


def cmd_sweep(args):
    if args.spec:
        specs = sweep.load_spec(args.spec)
    else:
        missing = [f for f in ("graph", "policy", "tau", "c", "b") if getattr(args, f) is None]
        if missing:
            raise CliError(f"sweep needs --spec or all of --{', --'.join(missing)}")
        _check_delay(args.policy, args.tau, args.d, args.allow_delay_mismatch)
        specs = [sweep.spec_from_flags(
            args.policy, args.tau, args.c, args.b, args.graph, repeats=args.repeats,
            base_seed=args.seed, t_total_ns=args.time, d_ns=args.d,
            allow_delay_mismatch=args.allow_delay_mismatch, targets=_targets(args.graph, args.target),
        )]
    results = _execute(specs, args.graph_dir, args.jobs, args.trace_out is not None)
    with _open_out(args.out) as fh:
        fh.write(sweep.records_csv([r for r, _ in results]))
    _write_traces(args.trace_out, results)


def _execute(specs, graph_dir, jobs_n, keep_trace):
    try:
        jobs = sweep.enumerate_jobs(specs)
    except UnknownBenchmarkError as exc:
        raise CliError(str(exc)) from None
    graph_dir = graph_dir or None
    _preflight(jobs, graph_dir)
    try:
        return sweep.run_jobs(jobs, graph_dir, jobs_n, keep_trace)
    except sweep.SweepError as exc:
        raise CliError(str(exc), EXIT_FAILURE) from None


def _preflight(jobs, graph_dir):
    from .gset import find_graph_file

    for name in sorted({j.instance for j in jobs}):
        try:
            find_graph_file(name, graph_dir)
        except FileNotFoundError as exc:
            raise CliError(str(exc)) from None


def _write_traces(path, results):
    if path is None:
        return
    pairs = [(rec["run_id"], tr) for rec, tr in results]
    Path(path).write_text(sweep.traces_csv(pairs))


def _read(path, **kw):
    if path == "-":
        return sweep.read_records(sys.stdin, **kw)
    with open(path, newline="") as fh:
        return sweep.read_records(fh, **kw)


def cmd_landscape(args):
    rows = _read(args.results)
    out = sweep.landscape(rows, args.bins)
    with _open_out(args.out) as fh:
        sweep.write_csv(out, sweep.LANDSCAPE_COLUMNS, fh)


def cmd_summary(args):
    rows = _read(args.results, required=("graph", "policy", "tau_ns", "c", "b", "cost_norm", "normalized_cut"))
    summary = sweep.summarize(rows)
    if args.best or args.max_bits is not None or args.tau is not None:
        summary = sweep.best_per_policy(summary, args.max_bits, args.tau) if args.best else [
            s for s in summary
            if (args.max_bits is None or int(s["b"]) <= args.max_bits)
            and (args.tau is None or float(s["tau_ns"]) == args.tau)
        ]
    with _open_out(args.out) as fh:
        sweep.write_csv(summary, sweep.SUMMARY_COLUMNS, fh)


def cmd_graphs(args):
    for e in sorted(registry(), key=lambda e: int(e.name[1:])):
        print(f"{e.name} {e.n} {e.m} {e.target}")


def cmd_recipes(args):
    for name in sweep.recipe_names():
        print(name)


COMMANDS = {
    "run": cmd_run,
    "sweep": cmd_sweep,
    "landscape": cmd_landscape,
    "summary": cmd_summary,
    "graphs": cmd_graphs,
    "recipes": cmd_recipes,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        COMMANDS[args.cmd](args)
    except CliError as exc:
        print(f"pbitsim: error: {exc}", file=sys.stderr)
        return exc.code
    except (sweep.SpecError, ValueError) as exc:
        print(f"pbitsim: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return 0


if __name__ == "__main__":
    sys.exit(main())
