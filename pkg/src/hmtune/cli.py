"""Command-line front end: ``hmtune <command> [options]``.

Commands
    gen-trace   write a synthetic trace to a file
    collect     reuse-distance histogram of a trace (or echo a loop histogram)
    candidates  candidate periods from Cori or a step-function baseline
    tune        run a tuning session over a candidate set
    sweep       simulate every period on a grid (exhaustive ground truth)
    compare     replay the fixed periods of existing solutions next to the tuned one

Every command writes one CSV into ``--out`` and is deterministic given its
arguments.
"""

from __future__ import annotations

import argparse
import csv
import os
import sys
import tempfile

from hmtune.config import SessionConfig, load_config, parse_overrides
from hmtune.errors import HmtuneError, InvalidParameterError
from hmtune.freqgen import (
    CANDIDATE_COLUMNS,
    Source,
    baseline_candidates,
    cori_candidates,
    dominant_reuse,
    source_from_generator,
    to_request_domain,
)
from hmtune.memsim import all_fast_runtime, simulate
from hmtune.reuse import (
    DEFAULT_BIN_WIDTH,
    HEADERS,
    Domain,
    collect_reuse,
    import_loop_histogram,
    read_histogram_csv,
)
from hmtune.scheduler import NOOP, SchedulerSpec
from hmtune.trace import PatternKind, TraceFormat, load_trace, parse_synthetic_spec, save_trace
from hmtune.tuner import TRIAL_COLUMNS, StoppingPolicy, exhaustive_best, run_tuning

# periods of existing page schedulers, in requests (10,000 requests = 1 s)
FIXED_PERIODS = [
    ("thermostat", 100_000),
    ("nimble", 50_000),
    ("ingens", 20_000),
    ("hma", 10_000),
    ("hetero-os", 1_000),
    ("kleio", 100),
]

SWEEP_COLUMNS = ["period", "runtime_ns", "access_time_ns", "slowdown_vs_allfast",
                 "slowdown_vs_best", "bytes_moved", "bytes_per_period", "migrations",
                 "fast_hit_fraction"]
COMPARE_COLUMNS = ["solution", "period", "period_seconds", "status", "runtime_ns",
                   "slowdown_vs_allfast", "bytes_moved", "migrations", "fast_hit_fraction"]


# ---------------------------------------------------------------- helpers

def _write_csv(path, header, rows) -> None:
    """Write atomically so a failed command never leaves a partial file."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=".csv")
    try:
        with os.fdopen(fd, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(header)
            for row in rows:
                writer.writerow([_fmt(v) for v in row])
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _fmt(value):
    if isinstance(value, float):
        return repr(value)
    return value


def _out_path(args, name: str) -> str:
    os.makedirs(args.out, exist_ok=True)
    return os.path.join(args.out, name)


def _looks_synthetic(text: str) -> bool:
    return text.split(":", 1)[0] in {k.value for k in PatternKind} and ":" in text


def _trace(args):
    if args.trace is None:
        raise InvalidParameterError("--trace is required")
    if os.path.exists(args.trace) or not _looks_synthetic(args.trace):
        return load_trace(args.trace, args.format, args.page_size)
    return parse_synthetic_spec(args.trace)


def _session(args) -> SessionConfig:
    session = load_config(args.config) if args.config else SessionConfig()
    memory = parse_overrides(type(session.memory), _pairs(args.set_memory), session.memory)
    sched_items = _pairs(args.set_scheduler)
    if getattr(args, "scheduler", None):
        sched_items.append(("kind", args.scheduler))
    scheduler = parse_overrides(SchedulerSpec, sched_items, session.scheduler)
    policy_items = _pairs(args.set_policy)
    for key in ("patience", "max_trials", "selection_rule", "target_slowdown"):
        value = getattr(args, key, None)
        if value is not None:
            policy_items.append((key, str(value)))
    policy = parse_overrides(StoppingPolicy, policy_items, session.policy)
    return SessionConfig(memory, scheduler, policy)


def _pairs(items) -> list:
    out = []
    for item in items or ():
        if "=" not in item:
            raise InvalidParameterError(f"expected key=value, got {item!r}")
        out.append(tuple(item.split("=", 1)))
    return out


def _candidates(args, trace, session):
    """Candidate set in the request domain for the chosen generator."""
    source = source_from_generator(args.generator)
    n = len(trace)
    rps = session.memory.requests_per_second
    if source is Source.CORI:
        if args.loops:
            hist = import_loop_histogram(args.loops)
        elif args.histogram:
            hist = read_histogram_csv(args.histogram)
        else:
            hist = collect_reuse(trace, args.bin_width)
        dr = dominant_reuse(hist)
        runtime = n if dr.domain is Domain.REQUESTS else n / rps
        cands = cori_candidates(dr, runtime)
    else:
        ordering = source.value.split("-", 1)[1]
        cands = baseline_candidates(args.timestep, n, ordering, args.seed)
    return to_request_domain(cands, rps)


# ---------------------------------------------------------------- commands

def cmd_gen_trace(args) -> int:
    trace = parse_synthetic_spec(args.trace) if _looks_synthetic(args.trace) else None
    if trace is None:
        raise InvalidParameterError(f"{args.trace!r} is not a synthetic trace spec")
    ext = "csv" if TraceFormat(args.format) is TraceFormat.PAGE_CSV else "txt"
    path = _out_path(args, args.name or f"trace.{ext}")
    save_trace(trace, path, args.format)
    print(f"wrote {len(trace)} accesses over {trace.footprint_pages} pages to {path}")
    return 0


def cmd_collect(args) -> int:
    if args.loops:
        hist = import_loop_histogram(args.loops)
    else:
        hist = collect_reuse(_trace(args), args.bin_width)
    path = _out_path(args, "reuse.csv")
    _write_csv(path, [HEADERS[hist.domain], "count"], hist.bins)
    print(f"{len(hist)} bins, {hist.total_observations} reuses -> {path}")
    return 0


def cmd_candidates(args) -> int:
    session = _session(args)
    trace = _trace(args)
    cands = _candidates(args, trace, session)
    if cands.warning:
        print(f"warning: {cands.warning}", file=sys.stderr)
    path = _out_path(args, "candidates.csv")
    _write_csv(path, CANDIDATE_COLUMNS, ([r[c] for c in CANDIDATE_COLUMNS] for r in cands.csv_rows()))
    print(f"{len(cands)} candidates ({cands.order_note}) -> {path}")
    return 0


def cmd_tune(args) -> int:
    session = _session(args)
    trace = _trace(args)
    cands = _candidates(args, trace, session)
    report = run_tuning(cands, trace, session.memory, session.scheduler, session.policy)
    path = _out_path(args, "trials.csv")
    _write_csv(path, TRIAL_COLUMNS + ["selected"],
               ([getattr(t, c) for c in TRIAL_COLUMNS] + [int(t.period == report.selected_period)]
                for t in report.trials))
    sel = report.selected
    rps = session.memory.requests_per_second
    print(f"generator: {report.source}  scheduler: {session.scheduler.label}")
    print(f"trials_used: {report.trials_used} (stop: {report.stop_reason.value})")
    print(f"selected period: {sel.period} requests ({sel.period / rps:g} s), trial {sel.trial_index}")
    print(f"slowdown vs all-fast: {sel.slowdown_vs_allfast:.4f}")
    print(f"bytes moved: {sel.bytes_moved}")
    return 0


def cmd_sweep(args) -> int:
    session = _session(args)
    trace = _trace(args)
    if args.step < 1:
        raise InvalidParameterError("--step must be >= 1")
    best_period, best_ns, sweep = exhaustive_best(trace, session.memory, session.scheduler,
                                                  args.step, args.workers)
    rows = ([t.period, t.runtime_ns, t.access_time_ns, t.slowdown_vs_allfast,
             t.runtime_ns / best_ns - 1.0, t.bytes_moved, t.bytes_moved / t.periods,
             t.migrations, t.fast_hit_fraction] for t in sweep)
    path = _out_path(args, "sweep.csv")
    _write_csv(path, SWEEP_COLUMNS, rows)
    print(f"{len(sweep)} periods; best {best_period} requests, runtime {best_ns:.1f} ns -> {path}")
    return 0


def cmd_compare(args) -> int:
    session = _session(args)
    trace = _trace(args)
    cfg, sched = session.memory, session.scheduler
    n = len(trace)
    ideal = all_fast_runtime(trace, cfg)
    rps = cfg.requests_per_second

    def row(name, period, scheduler):
        if period > n:
            return [name, period, period / rps, "longer-than-trace", "", "", "", "", ""]
        sim = simulate(trace, cfg, scheduler, period)
        return [name, period, period / rps, "ok", sim.runtime_ns, sim.runtime_ns / ideal - 1.0,
                sim.bytes_moved, sim.migrations, sim.fast_hit_fraction]

    rows = [row(name, period, sched) for name, period in FIXED_PERIODS]
    report = run_tuning(_candidates(args, trace, session), trace, cfg, sched, session.policy)
    rows.append(row(report.source, report.selected_period, sched))
    rows.append(row("no-migration", n, NOOP))
    path = _out_path(args, "compare.csv")
    _write_csv(path, COMPARE_COLUMNS, rows)
    print(f"{len(rows)} solutions compared -> {path}")
    return 0


# ---------------------------------------------------------------- parser

def _common(sub, with_trace=True, with_session=False, with_generator=False):
    # global flags repeated on every subcommand so they work in either position
    sub.add_argument("--config", default=argparse.SUPPRESS, help="INI config file")
    sub.add_argument("--out", default=argparse.SUPPRESS, help="output directory")
    sub.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="seed for base-random")
    if with_trace:
        sub.add_argument("--trace", help="trace file or synthetic spec kind:PxR[:seed][:key=value]")
        sub.add_argument("--format", default="hex-address", choices=[f.value for f in TraceFormat])
        sub.add_argument("--page-size", type=int, default=4096)
    if with_session:
        sub.add_argument("--scheduler", choices=["reactive", "predictive", "no-op"])
        sub.add_argument("--set-memory", action="append", metavar="KEY=VALUE")
        sub.add_argument("--set-scheduler", action="append", metavar="KEY=VALUE")
        sub.add_argument("--set-policy", action="append", metavar="KEY=VALUE")
    if with_generator:
        sub.add_argument("--generator", default="cori", choices=[s.value for s in Source])
        sub.add_argument("--bin-width", type=int, default=DEFAULT_BIN_WIDTH)
        sub.add_argument("--histogram", help="reuse histogram CSV instead of collecting one")
        sub.add_argument("--loops", help="loop-duration histogram CSV (seconds domain)")
        sub.add_argument("--timestep", type=int, default=100, help="baseline step, in requests")
        sub.add_argument("--patience", type=int)
        sub.add_argument("--max-trials", type=int)
        sub.add_argument("--selection-rule", choices=["min-runtime", "first-knee"])
        sub.add_argument("--target-slowdown", type=float)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hmtune", description=__doc__.splitlines()[0])
    parser.add_argument("--config", default=None, help="INI config file")
    parser.add_argument("--out", default=".", help="output directory (default: .)")
    parser.add_argument("--seed", type=int, default=0, help="seed for base-random (default: 0)")
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("gen-trace", help="write a synthetic trace")
    _common(p)
    p.add_argument("--name", help="output file name (default: trace.txt / trace.csv)")
    p.set_defaults(func=cmd_gen_trace)

    p = subs.add_parser("collect", help="reuse-distance histogram")
    _common(p)
    p.add_argument("--bin-width", type=int, default=DEFAULT_BIN_WIDTH)
    p.add_argument("--loops", help="loop-duration histogram CSV to echo")
    p.set_defaults(func=cmd_collect)

    p = subs.add_parser("candidates", help="generate candidate periods")
    _common(p, with_session=True, with_generator=True)
    p.set_defaults(func=cmd_candidates)

    p = subs.add_parser("tune", help="run a tuning session")
    _common(p, with_session=True, with_generator=True)
    p.set_defaults(func=cmd_tune)

    p = subs.add_parser("sweep", help="simulate every period on a grid")
    _common(p, with_session=True)
    p.add_argument("--step", type=int, default=100, help="grid step in requests (default: 100)")
    p.add_argument("--workers", type=int, default=None)
    p.set_defaults(func=cmd_sweep)

    p = subs.add_parser("compare", help="fixed periods of existing solutions vs the tuned one")
    _common(p, with_session=True, with_generator=True)
    p.set_defaults(func=cmd_compare)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (FileNotFoundError, IsADirectoryError, PermissionError) as exc:
        print(f"hmtune: error: {exc.filename or exc}: {exc.strerror or 'cannot open'}", file=sys.stderr)
        return 2
    except HmtuneError as exc:
        print(f"hmtune: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
