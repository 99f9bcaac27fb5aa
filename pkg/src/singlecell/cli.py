"""Command line frontend.

    singlecell run INSTANCE [--heuristic H] [--verify N] [--seed K]
                            [--derivative-fallback] [--stats-json] [--sample a,b,...]
    singlecell generate --vars N --polys M --degree D --coeff-bound B --seed K [-o PATH]
    singlecell bench (--bench DIR | --corpus N) [--heuristic H ...] [--verify N] [--csv PATH]

Exit codes: 0 success, 1 usage or parse error, 2 nullification.
"""

from __future__ import annotations

import argparse
import json
import sys

from .bench import HEURISTICS, bench, build_cell, corpus, instances_from_dir, to_csv
from .cellmodel import describe
from .exact import format_rational
from .instance import InstanceError, SmtlibError, generate, load_instance
from .poly import PolyParseError
from .scc import NullificationFailure
from .verify import check_certificates, verify_sign_invariance

EXIT_OK, EXIT_USAGE, EXIT_NULLIFIED = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="singlecell", description="Single cell construction over the reals.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    run = sub.add_parser("run", help="construct the cell around the sample of an instance")
    run.add_argument("instance", help="native .json instance or .smt2 script")
    run.add_argument("--heuristic", choices=HEURISTICS, default="bc")
    run.add_argument("--verify", type=int, default=0, metavar="N",
                     help="check sign invariance at N sampled points")
    run.add_argument("--seed", type=int, default=0, metavar="K")
    run.add_argument("--derivative-fallback", action="store_true")
    run.add_argument("--stats-json", action="store_true", help="print only the counters")
    run.add_argument("--sample", help="comma separated rationals (required for .smt2)")

    gen = sub.add_parser("generate", help="write a random instance")
    gen.add_argument("--vars", type=int, default=2)
    gen.add_argument("--polys", type=int, default=3)
    gen.add_argument("--degree", type=int, default=3)
    gen.add_argument("--coeff-bound", type=int, default=10)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("-o", "--output")

    b = sub.add_parser("bench", help="metric table over a directory or the generated corpus")
    src = b.add_mutually_exclusive_group(required=True)
    src.add_argument("--bench", metavar="DIR", help="directory of .json instances")
    src.add_argument("--corpus", type=int, metavar="N", help="generated corpus, seeds 1..N")
    b.add_argument("--heuristic", action="append", choices=HEURISTICS)
    b.add_argument("--verify", type=int, default=0, metavar="N")
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--derivative-fallback", action="store_true")
    b.add_argument("--csv", metavar="PATH")
    return ap


def _cmd_run(args) -> int:
    sample = args.sample.split(",") if args.sample else None
    try:
        inst = load_instance(args.instance, sample)
    except (OSError, InstanceError, SmtlibError, PolyParseError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        cell = build_cell(inst, args.heuristic, args.derivative_fallback)
    except NullificationFailure as exc:
        print(f"FAIL {exc}", file=sys.stderr)
        return EXIT_NULLIFIED
    if args.verify:
        rep = verify_sign_invariance(inst.polynomials, cell, args.verify, args.seed)
        cell.verification = rep.as_dict(inst.var_order.names)
        if cell.certificates:
            bad = check_certificates(cell, args.verify, args.seed)
            cell.verification["certificate_failures"] = len(bad)
        if not rep.passed:
            print(f"warning: {len(rep.violations)} sign violations", file=sys.stderr)
    if args.stats_json:
        ratio = cell.stats.omission_ratio()
        doc = {"heuristic": cell.heuristic, "stats": cell.stats.as_dict(),
               "omission_ratio": None if ratio is None else format_rational(ratio)}
    else:
        doc = describe(cell)
    print(json.dumps(doc, indent=2))
    return EXIT_OK


def _cmd_generate(args) -> int:
    try:
        inst = generate(args.vars, args.polys, args.degree, args.coeff_bound, args.seed)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    text = json.dumps(inst.to_document(), indent=2) + "\n"
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _cmd_bench(args) -> int:
    try:
        instances = instances_from_dir(args.bench) if args.bench else corpus(args.corpus)
    except (OSError, InstanceError, PolyParseError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    rows = bench(instances, tuple(args.heuristic or HEURISTICS), args.verify, args.seed,
                 args.derivative_fallback)
    text = to_csv(rows, args.csv)
    if not args.csv:
        sys.stdout.write(text)
    return EXIT_OK


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    handler = {"run": _cmd_run, "generate": _cmd_generate, "bench": _cmd_bench}[args.command]
    return handler(args)


if __name__ == "__main__":
    sys.exit(main())
