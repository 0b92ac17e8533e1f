"""Command-line entry point.

Exit codes: 0 accept/success, 1 reject, 2 usage or validation error.
"""
from __future__ import annotations

import argparse
import json
import logging
import random
import sys
from dataclasses import replace
from pathlib import Path

from . import dp, io, oracle, reduction, svg
from .generate import random_problem
from .model import (
    InvalidInstanceError,
    InvalidLayoutError,
    InvalidProblemError,
    local_crossing_number,
    stats,
    validate_extension_problem,
    validate_instance,
    validate_layout,
)

EXIT_ACCEPT, EXIT_REJECT, EXIT_ERROR = 0, 1, 2


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    return Path(path).read_text(encoding="utf-8")


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _report(violations) -> None:
    for v in violations:
        print(v, file=sys.stderr)


def cmd_validate(args) -> int:
    text = _read(args.file)
    kind = io.detect_kind(text)
    if kind == "instance":
        report = validate_instance(io.parse_instance(text, validate=False))
    elif kind == "problem":
        report = validate_extension_problem(io.parse_problem(text, validate=False))
    else:
        if not args.problem:
            print("validating a layout requires --problem", file=sys.stderr)
            return EXIT_ERROR
        problem = io.parse_problem(_read(args.problem))
        layout = io.parse_layout(text)
        report = validate_layout(problem.full, layout)
        if not report:
            if layout.restrict(problem.fixed_characters) != problem.fixed_layout:
                print("RESTRICTION_MISMATCH: layout does not agree with the fixed layout",
                      file=sys.stderr)
                return EXIT_ERROR
            lcn = local_crossing_number(problem.full, layout)
            if lcn > problem.chi:
                print(f"BUDGET_EXCEEDED: local crossing number {lcn} > chi={problem.chi}",
                      file=sys.stderr)
                return EXIT_ERROR
    if report:
        _report(report)
        return EXIT_ERROR
    print("valid")
    return EXIT_ACCEPT


def cmd_solve(args) -> int:
    problem = io.parse_problem(_read(args.problem), validate=False)
    if args.chi is not None:
        problem = replace(problem, chi=args.chi)
    kwargs = {"prune": not args.no_prune}
    if args.min_chi:
        result = dp.min_chi(problem, **kwargs)
        if result is None:
            print("reject")
            print("min-chi none")
            return EXIT_REJECT
        print("accept")
        print(f"min-chi {result.chi}")
    else:
        result = dp.solve(problem, **kwargs)
        print("accept" if result.accepted else "reject")
    if result.accepted and args.witness:
        _write(args.witness, io.serialize_layout(result.witness))
    return EXIT_ACCEPT if result.accepted else EXIT_REJECT


def cmd_oracle(args) -> int:
    problem = io.parse_problem(_read(args.problem))
    result = oracle.brute_force_solve(problem)
    print("accept" if result.accepted else "reject")
    print(f"min-lcn {result.min_lcn if result.min_lcn is not None else 'none'}")
    if result.accepted and args.witness:
        _write(args.witness, io.serialize_layout(result.witness))
    return EXIT_ACCEPT if result.accepted else EXIT_REJECT


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def cmd_gen_eubp(args) -> int:
    e = oracle.EubpInstance(tuple(args.items), args.bins, args.capacity)
    problem = reduction.reduce(e)
    _write(args.out, io.serialize_problem(problem))
    return EXIT_ACCEPT


def cmd_random(args) -> int:
    rng = random.Random(args.seed)
    problem = random_problem(
        rng, max_tau=args.max_tau, max_characters=args.max_characters,
        max_new=args.max_new, max_chi=args.max_chi,
    )
    _write(args.out, io.serialize_problem(problem))
    return EXIT_ACCEPT


def cmd_render(args) -> int:
    text = _read(args.file)
    kind = io.detect_kind(text)
    highlight: frozenset[str] = frozenset()
    if kind == "problem":
        problem = io.parse_problem(text)
        if args.layout:
            instance, layout = problem.full, io.parse_layout(_read(args.layout))
            highlight = problem.new_characters
        else:
            instance, layout = problem.sub_instance, problem.fixed_layout
    elif kind == "layout":
        if not args.problem:
            print("rendering a layout requires --problem", file=sys.stderr)
            return EXIT_ERROR
        problem = io.parse_problem(_read(args.problem))
        instance, layout = problem.full, io.parse_layout(text)
        highlight = problem.new_characters
    else:
        print("render expects a problem or layout file", file=sys.stderr)
        return EXIT_ERROR
    doc = svg.render_svg(
        instance, layout, row_height=args.row_height, step=args.step,
        opacity=args.opacity, highlight=highlight,
    )
    _write(args.out, doc)
    return EXIT_ACCEPT


def cmd_stats(args) -> int:
    problem = io.parse_problem(_read(args.problem))
    out = stats(problem).as_dict()
    out["chi"] = problem.chi
    print(json.dumps(out, sort_keys=True))
    return EXIT_ACCEPT


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="storyline-ext",
        description="Extend fixed storyline layouts under a local crossing budget.",
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="validate an instance, problem or layout file")
    p.add_argument("file")
    p.add_argument("--problem", help="problem file a layout is checked against")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("solve", help="decide a problem with the dynamic program")
    p.add_argument("problem")
    p.add_argument("--chi", type=int, help="override the crossing budget")
    p.add_argument("--witness", help="write the witness layout here")
    p.add_argument("--min-chi", action="store_true", help="scan for the smallest feasible budget")
    p.add_argument("--no-prune", action="store_true", help="disable dominance pruning")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("oracle", help="decide a small problem by exhaustive search")
    p.add_argument("problem")
    p.add_argument("--witness")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("gen-eubp", help="build the bin-packing reduction instance")
    p.add_argument("--items", type=_int_list, required=True)
    p.add_argument("--bins", type=int, required=True)
    p.add_argument("--capacity", type=int, required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_gen_eubp)

    p = sub.add_parser("random", help="write a seeded random problem")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-tau", type=int, default=5)
    p.add_argument("--max-characters", type=int, default=4)
    p.add_argument("--max-new", type=int, default=2)
    p.add_argument("--max-chi", type=int, default=3)
    p.add_argument("--out")
    p.set_defaults(func=cmd_random)

    p = sub.add_parser("render", help="draw a problem's fixed layout or a witness as SVG")
    p.add_argument("file", help="problem or layout file")
    p.add_argument("--layout", help="full layout to draw over the problem's instance")
    p.add_argument("--problem", help="problem file when FILE is a layout")
    p.add_argument("--out")
    p.add_argument("--row-height", type=float, default=24)
    p.add_argument("--step", type=float, default=48)
    p.add_argument("--opacity", type=float, default=0.25)
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("stats", help="print n, k, tau, mu, sigma and chi")
    p.add_argument("problem")
    p.set_defaults(func=cmd_stats)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    try:
        return args.func(args)
    except (InvalidInstanceError, InvalidProblemError, InvalidLayoutError) as exc:
        _report(exc.violations)
        return EXIT_ERROR
    except (io.FormatError, oracle.OracleSizeError, reduction.ReductionError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
