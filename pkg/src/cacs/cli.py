"""Command-line entry point.

Exit codes: 0 solution / feasible / agreement, 1 proven no-solution or
disagreement, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import os
import sys
import warnings
from typing import Optional, Sequence

from .engine import ResultKind, solve
from .messaging import NonTerminationError
from .model import DcspProblem, ModelError
from .oracle import InstanceTooLargeError, brute_force, satisfied
from .xmlio import DcsdpError, DcsdpWarning, read_dcsdp

EXIT_OK, EXIT_NO_SOLUTION, EXIT_INPUT = 0, 1, 2


def _default_seed() -> int:
    try:
        return int(os.environ.get("CACS_SEED", "0"))
    except ValueError:
        return 0


def _non_negative(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"must be non-negative, got {value}")
    return value


def _labels(p: DcspProblem) -> dict:
    names = [v.name for v in p.variables()]
    return {
        v: v.name if names.count(v.name) == 1 else f"{v.owner.name}.{v.name}"
        for v in p.variables()
    }


def _load(path: str, err) -> Optional[DcspProblem]:
    try:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", DcsdpWarning)
            p = read_dcsdp(path)
        for w in caught:
            print(f"warning: {w.message}", file=err)
        return p
    except (DcsdpError, OSError, ModelError) as exc:
        print(f"error: {path}: {exc}", file=err)
        return None


def cmd_solve(args, out=sys.stdout, err=sys.stderr) -> int:
    p = _load(args.input, err)
    if p is None:
        return EXIT_INPUT
    try:
        result = solve(p, seed=args.seed, max_deliveries=args.max_deliveries or None)
    except NonTerminationError as exc:
        print(f"error: {exc}", file=err)
        return EXIT_INPUT
    if args.trace:
        out.write(f"# seed={args.seed}\n")
        for line in result.trace_lines():
            out.write(line + "\n")
    labels = _labels(p)
    if result.kind is ResultKind.SOLUTION:
        if not args.machine:
            out.write(f"SOLUTION ({result.deliveries} deliveries, "
                      f"{result.proposals_tried} proposals)\n")
        for v in p.variables():
            out.write(f"{labels[v]}={result.assignment[v]}\n")
        code = EXIT_OK
    else:
        emptied = result.emptied_variable
        suffix = f" (emptied: {labels[emptied]})" if emptied is not None else ""
        out.write(f"NO SOLUTION{suffix}\n")
        code = EXIT_NO_SOLUTION
    if getattr(args, "figure", None):
        from .plotting import save_figure, topology_figure

        save_figure(topology_figure(p), args.figure)
    return code


def _verify_one(p: DcspProblem, seed: int, cap: int) -> tuple[bool, str]:
    oracle = brute_force(p, lex_min=True, cap=cap)
    result = solve(p, seed=seed)
    constraints = p.constraints()
    if result.is_solution and not all(satisfied(c, result.assignment) for c in constraints):
        return False, "engine solution violates a constraint"
    if oracle.satisfiable and not all(satisfied(c, oracle.witness) for c in constraints):
        return False, "oracle witness violates a constraint"
    verdict = "satisfiable" if oracle.satisfiable else "unsatisfiable"
    if result.is_solution != oracle.satisfiable:
        engine = "satisfiable" if result.is_solution else "unsatisfiable"
        return False, f"engine says {engine}, oracle says {verdict}"
    return True, verdict


def cmd_verify(args, out=sys.stdout, err=sys.stderr) -> int:
    if args.random:
        from .generate import random_problem

        bad = 0
        for i in range(args.random):
            p = random_problem(args.seed + i)
            ok, msg = _verify_one(p, args.seed + i, args.cap)
            if not ok:
                bad += 1
                out.write(f"DISAGREE: {p.name}: {msg}\n")
        out.write(f"{args.random - bad}/{args.random} instances agree\n")
        return EXIT_OK if bad == 0 else EXIT_NO_SOLUTION
    if not args.input:
        print("error: verify needs an input file or --random N", file=err)
        return EXIT_INPUT
    p = _load(args.input, err)
    if p is None:
        return EXIT_INPUT
    try:
        ok, msg = _verify_one(p, args.seed, args.cap)
    except InstanceTooLargeError as exc:
        print(f"error: {exc}", file=err)
        return EXIT_INPUT
    out.write(f"{'AGREE' if ok else 'DISAGREE'}: {msg}\n")
    return EXIT_OK if ok else EXIT_NO_SOLUTION


def cmd_demo(args, out=sys.stdout, err=sys.stderr) -> int:
    from .scheduling import (
        GanttTooWideError,
        SchedulingError,
        build_ship_loading,
        check_plan,
        gantt_text,
        read_tasks,
    )

    if args.scenario != "ship-loading":
        print(f"error: unknown demo {args.scenario!r}", file=err)
        return EXIT_INPUT
    if not args.tasks:
        print("error: demo ship-loading needs --tasks FILE", file=err)
        return EXIT_INPUT
    try:
        spec = read_tasks(args.tasks)
        model = build_ship_loading(spec)
    except (SchedulingError, OSError) as exc:
        print(f"error: {args.tasks}: {exc}", file=err)
        return EXIT_INPUT
    result = solve(model.problem, seed=args.seed, max_deliveries=args.max_deliveries or None)
    if args.trace:
        out.write(f"# seed={args.seed}\n")
        for line in result.trace_lines():
            out.write(line + "\n")
    plan = model.plan(result)
    if plan is None:
        out.write("NO SOLUTION\n")
        return EXIT_NO_SOLUTION
    verdict = check_plan(plan, spec)
    if args.machine:
        for t in spec.tasks:
            out.write(f"task={t.index} start={plan.starts[t.index]} end={plan.ends[t.index]}\n")
        out.write(f"general_end={plan.general_end}\n")
    else:
        out.write(f"{'task':>4} {'start':>5} {'end':>5} {'dur':>4} {'workers':>7}\n")
        for t in spec.tasks:
            out.write(f"{t.index:>4} {plan.starts[t.index]:>5} {plan.ends[t.index]:>5} "
                      f"{t.duration:>4} {t.workers:>7}\n")
        out.write(f"general_end={plan.general_end} makespan={plan.makespan}\n")
    if args.gantt:
        try:
            out.write(gantt_text(plan, spec, scale=args.scale))
        except GanttTooWideError as exc:
            print(f"error: {exc}", file=err)
            return EXIT_INPUT
    if args.figure:
        from .plotting import gantt_figure, save_figure

        save_figure(gantt_figure(plan, spec), args.figure)
    out.write(f"verdict: {verdict}\n")
    return EXIT_OK if verdict.feasible else EXIT_NO_SOLUTION


def cmd_trace_replay(args, out=sys.stdout, err=sys.stderr) -> int:
    """Re-run a solve and compare its trace with a recorded one."""
    try:
        with open(args.trace_file, encoding="utf-8") as fh:
            recorded = [ln.rstrip("\n") for ln in fh]
    except OSError as exc:
        print(f"error: {exc}", file=err)
        return EXIT_INPUT
    seed = args.seed
    for line in recorded:
        if line.startswith("# seed="):
            seed = int(line.split("=", 1)[1])
    recorded = [ln for ln in recorded if ln and not ln.startswith("#")]
    p = _load(args.input, err)
    if p is None:
        return EXIT_INPUT
    replay = solve(p, seed=seed).trace_lines()
    for i, (a, b) in enumerate(zip(recorded, replay), 1):
        if a != b:
            out.write(f"MISMATCH at line {i}:\n  recorded: {a}\n  replayed: {b}\n")
            return EXIT_NO_SOLUTION
    if len(recorded) != len(replay):
        out.write(f"MISMATCH: recorded {len(recorded)} lines, replayed {len(replay)}\n")
        return EXIT_NO_SOLUTION
    out.write(f"MATCH: {len(replay)} trace lines (seed {seed})\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cacs", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--seed", type=_non_negative, default=_default_seed(),
                        help="scheduler seed (default: $CACS_SEED or 0)")
        sp.add_argument("--max-deliveries", type=_non_negative, default=0,
                        help="delivery budget per quiescence run (0 = automatic)")

    sp = sub.add_parser("solve", help="solve a dcsdp XML problem")
    sp.add_argument("input")
    common(sp)
    sp.add_argument("--trace", action="store_true", help="print the delivery log")
    sp.add_argument("--machine", action="store_true", help="var=value lines only")
    sp.add_argument("--figure", help="write the agent topology figure to this file")
    sp.set_defaults(func=cmd_solve)

    sp = sub.add_parser("verify", help="compare the solver with brute force")
    sp.add_argument("input", nargs="?")
    common(sp)
    sp.add_argument("--cap", type=_non_negative, default=10**7,
                    help="largest search space the oracle may enumerate")
    sp.add_argument("--random", type=_non_negative, default=0, metavar="N",
                    help="verify N generated instances instead of a file")
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("demo", help="run a bundled application")
    sp.add_argument("scenario", choices=["ship-loading"])
    sp.add_argument("--tasks", help="task file")
    common(sp)
    sp.add_argument("--gantt", action="store_true", help="print a text Gantt chart")
    sp.add_argument("--scale", type=int, default=1, help="time units per Gantt column")
    sp.add_argument("--figure", help="write a Gantt/load figure to this file")
    sp.add_argument("--trace", action="store_true")
    sp.add_argument("--machine", action="store_true")
    sp.set_defaults(func=cmd_demo)

    sp = sub.add_parser("trace-replay", help="check a recorded --trace against a re-run")
    sp.add_argument("input")
    sp.add_argument("--trace-file", required=True)
    common(sp)
    sp.set_defaults(func=cmd_trace_replay)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    return args.func(args, sys.stdout, sys.stderr)


if __name__ == "__main__":
    sys.exit(main())
