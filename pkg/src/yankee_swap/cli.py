"""Command-line front end.

Exit codes: 0 success, 2 validation error, 3 instance too large to
brute-force, 4 engine/oracle mismatch, 5 fuzz violations, 6 query limit hit.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import bench as bench_mod
from .criteria import (
    CRITERION_NAMES,
    FairShare,
    Harmonic,
    Leximin,
    Lorenz,
    Nash,
    PMean,
    format_rational,
    parse_rational,
)
from .engine import resolve_criterion, run
from .errors import CriterionError, QueryLimitExceeded, TooLargeError, ValidationError, YankeeSwapError
from .fuzz import fuzz_strategyproofness
from .instance_file import dump_json, example_names, load_instance
from .oracles import brute_force_optimum, check_efx, check_mms_satisfaction, check_wef1, compute_mms, max_usw
from .valuations import QueryCounter, counter

EXIT_OK, EXIT_INVALID, EXIT_TOO_LARGE, EXIT_MISMATCH, EXIT_FUZZ, EXIT_QUERY_LIMIT = 0, 2, 3, 4, 5, 6
DEFAULT_CRITERION = "leximin"
DEFAULT_P = "1/2"


class _Fail(Exception):
    def __init__(self, code, message):
        super().__init__(message)
        self.code = code


def _shares(args, inst) -> tuple[Fraction, ...]:
    source = args.shares
    if source is None:
        if inst.shares is not None:
            return inst.shares
        source = "auto"
    if source == "auto":
        return tuple(Fraction(compute_mms(inst, i)) for i in range(inst.n))
    try:
        raw = json.loads(Path(source).read_text())
        return tuple(parse_rational(x) for x in raw)
    except (OSError, ValueError, TypeError) as exc:
        raise ValidationError([f"--shares {source}: {exc}"]) from exc


def build_criterion(name, args, inst, from_file=None):
    """Criterion from CLI flags, falling back to the file's criterion block."""
    if name is None:
        if from_file is not None:
            if isinstance(from_file, PMean) and args.p is not None:
                return PMean(parse_rational(args.p))
            if isinstance(from_file, FairShare) and args.shares is not None:
                return FairShare(_shares(args, inst))
            return resolve_criterion(from_file, inst)
        name = DEFAULT_CRITERION
    if name == "lorenz":
        return resolve_criterion(Lorenz(), inst)
    if name == "leximin":
        return Leximin()
    if name == "fair_share":
        return FairShare(_shares(args, inst))
    if name == "nash":
        return Nash()
    if name == "pmean":
        return PMean(parse_rational(args.p if args.p is not None else DEFAULT_P))
    if name == "harmonic":
        return Harmonic()
    raise CriterionError(f"unknown criterion {name!r}")


def _emit(obj, args) -> None:
    sys.stdout.write(dump_json(obj, pretty=args.pretty) + "\n")


def cmd_solve(args) -> int:
    inst, file_criterion = load_instance(args.path)
    c = build_criterion(args.criterion, args, inst, file_criterion)
    result = run(inst, c)
    _emit(result.to_json(), args)
    return EXIT_OK


def cmd_verify(args) -> int:
    inst, file_criterion = load_instance(args.path)
    if args.criterion == "all" or (args.criterion is None and file_criterion is None):
        names = list(CRITERION_NAMES)
    else:
        names = [args.criterion]
    try:
        usw_opt = max_usw(inst)
    except TooLargeError as exc:
        raise _Fail(EXIT_TOO_LARGE, f"instance too large to verify: {exc}") from exc
    sections = []
    all_match = True
    for name in names:
        c = build_criterion(name, args, inst, file_criterion if name is None else None)
        result = run(inst, c)
        opt = brute_force_optimum(inst, c)
        match = tuple(result.utilities) == tuple(opt.best_utilities) and result.usw == usw_opt
        all_match &= match
        efx = check_efx(inst, result)
        wef1 = check_wef1(inst, result)
        section = {
            "criterion": c.to_json(),
            "status": "MATCH" if match else "MISMATCH",
            "engine_utilities": list(result.utilities),
            "oracle_utilities": list(opt.best_utilities),
            "oracle_optimal_vectors": opt.best_count,
            "engine_usw": result.usw,
            "oracle_max_usw": usw_opt,
            "efx": "ok" if efx is None else efx.to_json(),
            "wef1": "ok" if wef1 is None else wef1.to_json(),
        }
        if isinstance(c, FairShare):
            mms = check_mms_satisfaction(result, c.shares)
            section["shares"] = [format_rational(s) for s in c.shares]
            section["share_satisfaction"] = "ok" if mms is None else mms.to_json()
        sections.append(section)
    _emit({"status": "MATCH" if all_match else "MISMATCH", "results": sections}, args)
    return EXIT_OK if all_match else EXIT_MISMATCH


def cmd_mms(args) -> int:
    inst, _ = load_instance(args.path)
    try:
        shares = [compute_mms(inst, i) for i in range(inst.n)]
    except TooLargeError as exc:
        raise _Fail(EXIT_TOO_LARGE, str(exc)) from exc
    _emit({"shares": shares}, args)
    return EXIT_OK


def cmd_fuzz(args) -> int:
    inst, file_criterion = load_instance(args.path)
    c = build_criterion(args.criterion, args, inst, file_criterion)
    report = fuzz_strategyproofness(inst, c, args.trials, args.seed)
    out = report.to_json()
    out["criterion"] = c.to_json()
    out["seed"] = args.seed
    _emit(out, args)
    return EXIT_FUZZ if report.violations else EXIT_OK


def _int_list(text):
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc


def cmd_bench(args) -> int:
    rows = bench_mod.run_bench(args.sizes, args.ns, family=args.family, seed=args.seed, naive=args.naive)
    text = bench_mod.to_csv(rows)
    if args.output:
        Path(args.output).write_text(text)
    sys.stdout.write(text)
    if args.plot:
        from .plotting import plot_bench

        plot_bench(rows, args.plot)
    sys.stderr.write(f"fitted constant C = {bench_mod.fitted_constant(rows):.4f}\n")
    return EXIT_OK


def cmd_examples(args) -> int:
    for name in example_names():
        print(f"example:{name}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="yankee-swap", description="General Yankee Swap fair allocation.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, criterion_choices=CRITERION_NAMES):
        p.add_argument("path", help="instance JSON file, or example:NAME for a bundled example")
        p.add_argument("--criterion", choices=criterion_choices, default=None)
        p.add_argument("--p", default=None, help="exponent for pmean, as a/b (default 1/2)")
        p.add_argument("--shares", default=None, help="'auto' (maximin shares) or a JSON file of rationals")
        out = p.add_mutually_exclusive_group()
        out.add_argument("--pretty", action="store_true", help="indented JSON")
        out.add_argument("--json", dest="pretty", action="store_false", help="compact JSON (default)")

    p = sub.add_parser("solve", help="allocate and print the run result")
    common(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("verify", help="compare the engine with brute force")
    common(p, (*CRITERION_NAMES, "all"))
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("mms", help="print every agent's maximin share")
    common(p)
    p.set_defaults(func=cmd_mms)

    p = sub.add_parser("fuzz", help="randomized strategyproofness check")
    common(p)
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_fuzz)

    p = sub.add_parser("bench", help="valuation-query counts over a size sweep (CSV)")
    p.add_argument("--sizes", type=_int_list, default=[8, 16, 32, 64, 128])
    p.add_argument("--ns", type=_int_list, default=[2, 4, 8])
    p.add_argument("--family", default="partition")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--naive", action="store_true", help="also run the explicit-graph baseline")
    p.add_argument("--output", default=None, help="also write the CSV here")
    p.add_argument("--plot", default=None, help="render a figure to this file (png, pdf, svg)")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("examples", help="list bundled example instances")
    p.set_defaults(func=cmd_examples)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    counter.reset()
    counter.limit = QueryCounter.from_env().limit
    try:
        return args.func(args)
    except _Fail as exc:
        sys.stderr.write(f"error: {exc}\n")
        return exc.code
    except ValidationError as exc:
        sys.stderr.write("validation failed:\n" + "".join(f"  - {p}\n" for p in exc.problems))
        return EXIT_INVALID
    except TooLargeError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_TOO_LARGE
    except QueryLimitExceeded as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_QUERY_LIMIT
    except (YankeeSwapError, ValueError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INVALID
    finally:
        counter.limit = None


if __name__ == "__main__":
    sys.exit(main())
