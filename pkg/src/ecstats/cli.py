"""Command-line front end.

Exit codes: 0 success, 2 bad arguments, 3 violated precondition,
4 a verification report contains a FAIL.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from fractions import Fraction

from . import family, hurwitz, rankbound, reduction
from .census import compute_census
from .density import LocalCondition, empirical_density, joint_density
from .trace import TraceMomentSpec, moment_report
from .verify import DEFAULT_HEIGHT, DEFAULT_PRIMES, RunConfig, verify_all

EXIT_OK, EXIT_USAGE, EXIT_PRECONDITION, EXIT_FAIL = 0, 2, 3, 4


class PreconditionError(Exception):
    pass


def _primes(text: str) -> tuple[int, ...]:
    if not text.strip():
        return ()
    try:
        return tuple(int(t) for t in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad prime list {text!r}") from None


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None


def _dec(x) -> str:
    return f"{float(x):.12g}"


def _ratio(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def _emit_records(records: list[dict], fmt: str) -> str:
    if fmt == "json":
        return json.dumps(records[0] if len(records) == 1 else records, indent=2) + "\n"
    if fmt == "jsonl":
        return "".join(json.dumps(r) + "\n" for r in records)
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(records[0]), lineterminator="\n")
    w.writeheader()
    for r in records:
        w.writerow({k: json.dumps(v) if isinstance(v, (list, dict)) else v for k, v in r.items()})
    return buf.getvalue()


# --- subcommands ---------------------------------------------------------------

def cmd_enumerate(args) -> tuple[str, bool]:
    fmt = args.format or "csv"
    lines = []
    for a, b in family.enumerate_family(args.height):
        if fmt == "csv":
            lines.append(f"{a},{b}\n")
        else:
            lines.append(json.dumps({"a": a, "b": b}) + "\n")
    if fmt == "json":
        return json.dumps([json.loads(s) for s in lines]) + "\n", True
    return "".join(lines), True


def cmd_classify(args) -> tuple[str, bool]:
    primes = args.primes or DEFAULT_PRIMES
    if args.a is not None and args.b is not None:
        curves = [(args.a, args.b)]
        if 4 * args.a**3 + 27 * args.b**2 == 0:
            raise PreconditionError(f"({args.a}, {args.b}) is singular")
    elif args.height is not None:
        curves = list(family.enumerate_family(args.height))
    else:
        raise PreconditionError("classify needs either --a and --b, or --height")
    records = [
        {"a": a, "b": b, "reports": [reduction.reduction_report(a, b, p).to_dict() for p in primes]}
        for a, b in curves
    ]
    return _emit_records(records, args.format or "jsonl"), True


def cmd_density(args) -> tuple[str, bool]:
    if not args.condition:
        raise PreconditionError("density needs --condition")
    reports = []
    for text in args.condition.split(","):
        lc = LocalCondition.parse(text)
        reports.append(empirical_density(lc, args.height, workers=args.workers).to_dict())
    return _emit_records(reports, args.format or "json"), all(r["pass"] for r in reports)


def cmd_joint_density(args) -> tuple[str, bool]:
    text = args.conditions or args.condition
    conds = [LocalCondition.parse(t) for t in text.split(",")] if text else []
    r = joint_density(conds, args.height, workers=args.workers).to_dict()
    return _emit_records([r], args.format or "json"), r["pass"]


def cmd_trace(args) -> tuple[str, bool]:
    if args.spec is None:
        raise PreconditionError("trace needs --spec")
    spec = TraceMomentSpec.parse(args.spec, args.kind)
    r = moment_report(spec, args.height, workers=args.workers).to_dict()
    return _emit_records([r], args.format or "json"), r["pass"]


def cmd_hurwitz(args) -> tuple[str, bool]:
    if args.d is None:
        raise PreconditionError("hurwitz needs --d")
    return _ratio(hurwitz.hurwitz_class_number(args.d)) + "\n", True


def cmd_identities(args) -> tuple[str, bool]:
    p = args.prime
    if p is None or not family.is_prime(p) or p < 5:
        raise PreconditionError(f"--prime must be a prime >= 5, got {p}")
    first = hurwitz.kronecker_hurwitz_first_moment(p)
    second = hurwitz.eichler_selberg_second_moment(p)
    odd = hurwitz.odd_moment_vanishing(p, 1)
    rows = [
        ("first moment", first, 2 * p, "2p"),
        ("second moment", second, 2 * p * p - 2, "2p^2-2"),
        ("odd moment r=1", odd, 0, "0"),
    ]
    out, ok = [], True
    for name, got, want, label in rows:
        verdict = "PASS" if got == want else "FAIL"
        ok &= got == want
        out.append(f"{name}: {_ratio(Fraction(got))} = {label} = {want} {verdict}\n")
    return "".join(out), ok


def cmd_rank_table(args) -> tuple[str, bool]:
    max_a = args.max_a if args.max_a is not None else 35
    if max_a < 11:
        raise PreconditionError("--max-a must be >= 11")
    lines = ["a,bound,chosen_l,exact_num,exact_den\n"]
    for a in range(11, max_a + 1):
        row = rankbound.cdf_lower_bound(a)
        lines.append(f"{a},{row.truncated},{row.chosen_l},{row.bound.numerator},{row.bound.denominator}\n")
    return "".join(lines), True


def cmd_moment_bound(args) -> tuple[str, bool]:
    if args.n is None or args.n < 1:
        raise PreconditionError("--n must be a positive integer")
    v = rankbound.moment_bound(args.n)
    return f"{_ratio(v)} ≈ {float(v):.6f}\n", True


def cmd_tail_bound(args) -> tuple[str, bool]:
    if args.n is None or args.n < 1:
        raise PreconditionError("--n must be a positive integer")
    if args.C is None or args.C <= 0:
        raise PreconditionError("--C must be a positive rational")
    v = rankbound.tail_bound(args.n, args.C)
    return f"{_ratio(v)} ≈ {float(v):.6f}\n", True


def cmd_verify_all(args) -> tuple[str, bool]:
    extra = tuple(LocalCondition.parse(t) for t in (args.conditions or args.condition or "").split(",") if t)
    config = RunConfig(
        height_bound=args.height,
        primes=DEFAULT_PRIMES if args.primes is None else args.primes,
        conditions=extra,
        output_format=args.format or "json",
        worker_count=args.workers,
    )
    summary = verify_all(config)
    if config.output_format == "json":
        text = json.dumps(summary.to_dict(), indent=2) + "\n"
    else:
        text = _emit_records([c.to_dict() for c in summary.checks], config.output_format)
    return text, summary.passed


COMMANDS = {
    "enumerate": cmd_enumerate,
    "classify": cmd_classify,
    "density": cmd_density,
    "joint-density": cmd_joint_density,
    "trace": cmd_trace,
    "hurwitz": cmd_hurwitz,
    "identities": cmd_identities,
    "rank-table": cmd_rank_table,
    "moment-bound": cmd_moment_bound,
    "tail-bound": cmd_tail_bound,
    "verify-all": cmd_verify_all,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--height", type=int, default=DEFAULT_HEIGHT, help="height bound X")
    common.add_argument("--primes", type=_primes, default=None, help="comma-separated primes >= 5")
    common.add_argument("--condition", help="local condition, e.g. good@5 or ap=-2@7 or I0*@5")
    common.add_argument("--conditions", help="comma-separated local conditions")
    common.add_argument("--spec", help='moment spec "p^e:r,..." e.g. "5^1:2,7^2:1"')
    common.add_argument("--kind", choices=("ahat", "lambda"), default="ahat")
    common.add_argument("--n", type=int)
    common.add_argument("--C", type=_fraction)
    common.add_argument("--max-a", type=int, dest="max_a")
    common.add_argument("--d", type=int)
    common.add_argument("--prime", type=int)
    common.add_argument("--a", type=int)
    common.add_argument("--b", type=int)
    common.add_argument("--format", choices=("csv", "json", "jsonl"))
    common.add_argument("--out", help="write the report here instead of stdout")
    common.add_argument("--workers", type=int, default=1)
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="ecstats", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    if args.workers < 1:
        print("error: --workers must be >= 1", file=sys.stderr)
        return EXIT_PRECONDITION
    try:
        text, ok = COMMANDS[args.command](args)
    except (PreconditionError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK if ok else EXIT_FAIL


def main() -> None:
    sys.exit(run())
