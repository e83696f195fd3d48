"""``mkdbp`` command line.

Exit codes: 0 feasible / success, 1 infeasible / violation found,
2 usage, parse or overflow error.
"""

from __future__ import annotations

import argparse
import json
import sys

from .core import BoundOverflowError, hyperperiod, state_bound
from .render import GANTT_MAX_HORIZON, trace_gantt, trace_json, trace_text
from .schedulability import (
    SearchSpaceTooLarge,
    exact_test,
    feasibility_interval,
    search_initial_sequences,
)
from .sim import simulate
from .taskfile import TaskSetParseError, load_taskset

EXIT_OK = 0
EXIT_INFEASIBLE = 1
EXIT_ERROR = 2


class UsageError(Exception):
    pass


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def cmd_analyze(args, out) -> int:
    ts = load_taskset(args.file)
    v = exact_test(ts)
    if args.format == "json":
        out.write(_dump(v.to_dict(ts)))
    elif v.feasible:
        out.write("feasible\ntransient_start=%d\nperiod=%d\nhyperperiod=%d\n"
                  % (v.transient_start, v.period, v.hyperperiod))
    else:
        out.write("infeasible\nviolation_time=%d\ntask=%s\nsequence=%s\n"
                  % (v.violation_time, ts.tasks[v.violating_task].name, v.violating_sequence))
    return EXIT_OK if v.feasible else EXIT_INFEASIBLE


def cmd_simulate(args, out) -> int:
    if args.horizon <= 0:
        raise UsageError("horizon must be positive")
    if args.format == "gantt" and args.horizon > GANTT_MAX_HORIZON:
        raise UsageError("gantt output is limited to %d time units; use --format text or json"
                         % GANTT_MAX_HORIZON)
    ts = load_taskset(args.file)
    trace = simulate(ts, args.horizon)
    if args.format == "json":
        out.write(trace_json(trace, ts))
    elif args.format == "gantt":
        out.write(trace_gantt(trace, ts, args.horizon))
    else:
        out.write(trace_text(trace, ts))
    return EXIT_INFEASIBLE if trace.violated else EXIT_OK


def cmd_bound(args, out) -> int:
    ts = load_taskset(args.file)
    P = hyperperiod(ts)
    n = state_bound(ts)
    lo, hi = feasibility_interval(ts)
    if args.format == "json":
        out.write(_dump({"hyperperiod": P, "max": n, "interval": [lo, hi]}))
    else:
        out.write("P=%d\nmax=%d\ninterval=[%d,%d)\n" % (P, n, lo, hi))
    return EXIT_OK


def cmd_search(args, out) -> int:
    ts = load_taskset(args.file)
    if args.jobs < 1:
        raise UsageError("--jobs must be at least 1")
    report = search_initial_sequences(
        ts.tasks, ts.tiebreak, space=args.space, mode=args.mode, jobs=args.jobs
    )
    if args.format == "json":
        out.write(_dump(report.to_dict()))
    else:
        out.write("default 1^k: %s\n" % ("feasible" if report.default_feasible else "infeasible"))
        out.write("candidates: %d (%s)\n" % (
            report.total_candidates,
            "including error states" if report.includes_error_states else "valid only"))
        out.write("evaluated: %d\n" % report.evaluated)
        out.write("feasible: %d\n" % len(report.feasible_assignments))
        for a in report.feasible_assignments:
            out.write(" ".join(str(s) for s in a) + "\n")
    return EXIT_OK if report.feasible_assignments else EXIT_INFEASIBLE


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mkdbp",
        description="Exact DBP schedulability analysis for (m,k)-firm periodic task sets.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="exact schedulability test")
    p.add_argument("file")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("simulate", help="print the DBP schedule")
    p.add_argument("file")
    p.add_argument("--horizon", type=int, required=True)
    p.add_argument("--format", choices=("text", "json", "gantt"), default="text")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("bound", help="hyper-period, state bound and feasibility interval")
    p.add_argument("file")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("search", help="brute-force search over initial k-sequences")
    p.add_argument("file")
    p.add_argument("--space", choices=("valid", "all"), default="valid")
    p.add_argument("--mode", choices=("first", "all"), default="all")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=cmd_search)
    return parser


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_ERROR
    try:
        return args.func(args, out)
    except TaskSetParseError as e:
        for d in e.diagnostics:
            err.write("%s: %s\n" % (args.file, d))
    except OSError as e:
        err.write("mkdbp: cannot read %s: %s\n" % (args.file, e.strerror))
    except BoundOverflowError as e:
        err.write("mkdbp: %s\n" % e)
    except SearchSpaceTooLarge as e:
        err.write("mkdbp: %s; narrow the space (e.g. --space valid)\n" % e)
    except UsageError as e:
        err.write("mkdbp: %s\n" % e)
    return EXIT_ERROR


def main_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    main_entry()
