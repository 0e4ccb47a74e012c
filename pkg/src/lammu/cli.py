"""Command-line front end.

Exit codes: 0 success, 1 a checked property failed, 2 usage or input error,
3 fuel exhausted.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import derivation as deriv
from .lmus import eta_lmus, eta_lmus_oracle, lmus_step_all, synthesize_S_lmus
from .props import SUITES, run_suite
from .reduction import (
    FuelExhausted, STRATEGIES, eta_bruteforce, eta_max, reduce,
)
from .syntax import ParseError, format_path, free_names, free_vars, is_command, parse, pretty, size
from .transform import SynthesisFailure, synthesize_H, synthesize_S, verify_bound

OK, FAILED, USAGE, FUEL = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _read_input(args) -> str:
    if args.expr is not None:
        return args.expr
    if args.input is None:
        raise UsageError("give an input FILE, '-' for stdin, or -e TEXT")
    if args.input == "-":
        return sys.stdin.read()
    try:
        with open(args.input, encoding="utf-8") as f:
            return f.read()
    except OSError as e:
        raise UsageError(f"cannot read {args.input}: {e.strerror}") from None


def _object(args):
    return parse(_read_input(args), getattr(args, "calc", "lmus"))


def _emit(args, data: dict, text: str):
    if args.json:
        print(json.dumps(data, indent=2, ensure_ascii=False))
    else:
        print(text)


# ---------------------------------------------------------------- subcommands

def cmd_parse(args) -> int:
    o = _object(args)
    data = {"object": pretty(o), "kind": "command" if is_command(o) else "term", "size": size(o),
            "free_vars": sorted(free_vars(o)), "free_names": sorted(free_names(o))}
    _emit(args, data, pretty(o))
    return OK


def _step_json(s) -> dict:
    out = {"rule": s.rule, "path": format_path(s.path), "erasing": s.erasing}
    if getattr(s, "occ", None) is not None:
        out["occurrence"] = format_path(s.occ)
    if getattr(s, "fresh", None) is not None:
        out["fresh"] = s.fresh
    out["source"] = pretty(s.source)
    out["target"] = pretty(s.target)
    return out


def _reduce_lmus(o, strategy, fuel):
    trace = []
    while True:
        steps = lmus_step_all(o)
        if not steps:
            return trace, o
        if strategy == "exhaustive-one":
            here = eta_lmus_oracle(o, fuel)
            pick = next((s for s in steps if here is not None
                         and eta_lmus_oracle(s.target, fuel) == here - 1), steps[0])
        else:
            pick = steps[0]
        if len(trace) >= fuel:
            raise FuelExhausted(trace, o)
        trace.append(pick)
        o = pick.target


def cmd_reduce(args) -> int:
    o = _object(args)
    if args.calc == "lmus" and args.strategy == "head":
        raise UsageError("the head strategy is defined for lambda-mu only; use --calc lmu")
    code = OK
    try:
        if args.calc == "lmu":
            trace, final = reduce(o, args.strategy, args.fuel)
        else:
            trace, final = _reduce_lmus(o, args.strategy, args.fuel)
    except FuelExhausted as e:
        trace, final, code = e.trace, e.last, FUEL
    data = {"calculus": args.calc, "strategy": args.strategy, "count": len(trace),
            "final": pretty(final), "normal": code == OK}
    if args.trace:
        data["steps"] = [_step_json(s) for s in trace]
    lines = [s.describe(i + 1) for i, s in enumerate(trace)] if args.trace else []
    lines.append(f"{len(trace)} step(s){'' if code == OK else ' (fuel exhausted)'}: {pretty(final)}")
    _emit(args, data, "\n".join(lines))
    return code


def cmd_eta(args) -> int:
    o = _object(args)
    if args.calc == "lmu":
        fn = eta_bruteforce if args.oracle else eta_max
    else:
        fn = eta_lmus_oracle if args.oracle else eta_lmus
    value = fn(o, args.fuel)
    data = {"object": pretty(o), "calculus": args.calc, "method": "oracle" if args.oracle else "equations",
            "eta": value}
    _emit(args, data, "no finite maximal length found within the fuel" if value is None else str(value))
    return FUEL if value is None else OK


def cmd_check(args) -> int:
    text = _read_input(args)
    try:
        data = json.loads(text)
        if isinstance(data, dict) and "derivation" in data:  # output of `synthesize --json`
            data = data["derivation"]
        d = deriv.from_json(data)
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as e:
        raise UsageError(f"not a derivation: {e}") from None
    try:
        deriv.check_derivation(d)
    except deriv.DerivationError as e:
        _emit(args, {"valid": False, "error": str(e), "rule": e.rule, "path": format_path(e.path)},
              f"invalid: {e}")
        return FAILED
    sz = deriv.derivation_size(d)
    data = {"valid": True, "system": d.system, "judgment": d.judgment.show(),
            "size": _number(sz), "relevant": deriv.relevance_check(d)}
    _emit(args, data, f"valid {d.system} derivation of size {sz}\n{d.judgment.show()}")
    return OK


def _number(q):
    return int(q) if q.denominator == 1 else float(q)


def _synthesize(o, system, fuel):
    if system == "H":
        return synthesize_H(o, fuel)
    if system == "S":
        return synthesize_S(o, fuel)
    return synthesize_S_lmus(o, fuel)


def cmd_synthesize(args) -> int:
    args.calc = "lmus" if args.system == "Slmus" else "lmu"
    o = _object(args)
    try:
        d = _synthesize(o, args.system, args.fuel)
    except SynthesisFailure as e:
        _emit(args, {"object": pretty(o), "system": args.system, "error": str(e)}, f"gave up: {e}")
        return FUEL
    sz = deriv.derivation_size(d)
    data = {"object": pretty(o), "system": args.system, "size": _number(sz), "derivation": deriv.to_json(d)}
    _emit(args, data, f"{deriv.render(d)}\nsize {sz}")
    return OK


def cmd_verify_bound(args) -> int:
    args.calc = "lmu"
    o = _object(args)
    try:
        d = synthesize_H(o, args.fuel) if args.mode == "head" else synthesize_S(o, args.fuel)
    except SynthesisFailure as e:
        _emit(args, {"term": pretty(o), "bound_mode": args.mode, "error": str(e)}, f"gave up: {e}")
        return FUEL
    report = verify_bound(o, d, args.mode, args.fuel)
    if report.observed is None:
        code = FUEL
    else:
        code = OK if report.ok else FAILED
    text = (f"{report.system} size {report.size}, observed {report.observed} "
            f"({args.mode}): {'ok' if report.ok else 'VIOLATED'}")
    _emit(args, report.to_json(), text)
    return code


def cmd_proptest(args) -> int:
    seed = args.seed
    env = os.environ.get("LAMMU_SEED")
    if env is not None:
        try:
            seed = int(env)
        except ValueError:
            raise UsageError(f"LAMMU_SEED must be an integer, got {env!r}") from None
    report = run_suite(args.suite, args.count, seed, args.max_size, args.calc)
    lines = [report.summary()] + [f"  case {i}: {d}" for i, d in report.failures]
    _emit(args, report.to_json(), "\n".join(lines))
    return OK if report.ok else FAILED


# ---------------------------------------------------------------- parser

def _add_input(p):
    p.add_argument("input", nargs="?", help="input file, or '-' for stdin")
    p.add_argument("-e", "--expr", help="read the object from this text instead of a file")


def _positive(text):
    n = int(text)
    if n < 0:
        raise argparse.ArgumentTypeError("must be non-negative")
    return n


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lammu", description="Lambda-mu calculi and their quantitative types.")
    parser.add_argument("--json", action="store_true", help="print JSON instead of text")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("parse", help="parse and pretty-print an object")
    _add_input(p)
    p.add_argument("--calc", choices=("lmu", "lmus"), default="lmus")
    p.set_defaults(run=cmd_parse)

    p = sub.add_parser("reduce", help="reduce with a strategy")
    _add_input(p)
    p.add_argument("--calc", choices=("lmu", "lmus"), default="lmu")
    p.add_argument("--strategy", choices=tuple(STRATEGIES), default="head")
    p.add_argument("--fuel", type=_positive, default=1000)
    p.add_argument("--trace", action="store_true", help="list every step")
    p.set_defaults(run=cmd_reduce)

    p = sub.add_parser("eta", help="maximal reduction length")
    _add_input(p)
    p.add_argument("--calc", choices=("lmu", "lmus"), default="lmu")
    p.add_argument("--oracle", action="store_true", help="search the reduction graph instead")
    p.add_argument("--fuel", type=_positive, default=100_000)
    p.set_defaults(run=cmd_eta)

    p = sub.add_parser("check", help="check a derivation given as JSON")
    _add_input(p)
    p.set_defaults(run=cmd_check)

    p = sub.add_parser("synthesize", help="build a derivation")
    _add_input(p)
    p.add_argument("--system", choices=("H", "S", "Slmus"), default="S")
    p.add_argument("--fuel", type=_positive, default=100_000)
    p.set_defaults(run=cmd_synthesize)

    p = sub.add_parser("verify-bound", help="compare a synthesized size with reduction lengths")
    _add_input(p)
    p.add_argument("--mode", choices=("head", "max"), default="max")
    p.add_argument("--fuel", type=_positive, default=100_000)
    p.set_defaults(run=cmd_verify_bound)

    p = sub.add_parser("proptest", help="run a seeded property suite")
    p.add_argument("--suite", choices=SUITES, required=True)
    p.add_argument("--calc", choices=("lmu", "lmus"), default="lmu")
    p.add_argument("--count", type=_positive, default=100)
    p.add_argument("--seed", type=int, default=0, help="overridden by LAMMU_SEED")
    p.add_argument("--max-size", type=_positive, default=10)
    p.set_defaults(run=cmd_proptest)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.run(args)
    except UsageError as e:
        print(f"lammu: {e}", file=sys.stderr)
        return USAGE
    except ParseError as e:
        print(f"lammu: {e}", file=sys.stderr)
        return USAGE


if __name__ == "__main__":
    sys.exit(main())
