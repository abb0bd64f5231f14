"""Command-line front end.

Every subcommand is a thin adapter over one library call.  Scalars are printed
bare (floats with shortest round-trip ``repr``); structured results as JSON.
Exit status: 0 success, 1 runtime error, 2 usage error.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import os
import sys
from decimal import Decimal, InvalidOperation
from typing import List, Optional

from . import __version__, asym, exact, floorset, harness, psisum
from .errors import FloorPrimesError
from .primes import sieve


def _real(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a real number: {text!r}") from None
    if not math.isfinite(value):
        raise argparse.ArgumentTypeError(f"not finite: {text!r}")
    return value


def _floored_int(text: str) -> int:
    """Integer argument that also accepts reals and scientific notation, flooring with a note."""
    try:
        value = Decimal(text)
    except InvalidOperation:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not value.is_finite():
        raise argparse.ArgumentTypeError(f"not finite: {text!r}")
    floored = int(value.to_integral_value(rounding="ROUND_FLOOR"))
    if floored != value:
        print(f"note: {text} floored to {floored}", file=sys.stderr)
    return floored


def _fmt(value) -> str:
    return str(value) if isinstance(value, int) else repr(float(value))


def _dump(obj) -> None:
    if dataclasses.is_dataclass(obj):
        obj = dataclasses.asdict(obj)
    print(json.dumps(obj, default=str))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="floorprimes", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument(
        "--threads", type=int, default=os.cpu_count() or 1, help="worker cap; never changes results"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("pi-s", help="number of primes in S(x)")
    p.add_argument("--x", type=_floored_int, required=True)

    p = sub.add_parser("s-count", help="S_f(x) = sum_{n<=x} f([x/n])")
    p.add_argument("--f", choices=["prime", "prime-power", "lambda", "one"], required=True)
    p.add_argument("--x", type=_floored_int, required=True)

    p = sub.add_parser("cardinality", help="|S(x)|")
    p.add_argument("--x", type=_floored_int, required=True)

    p = sub.add_parser("progression", help="members of S(x) congruent to a mod q")
    p.add_argument("--x", type=_floored_int, required=True)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--a", type=int, required=True)

    p = sub.add_parser("lis", help="Li_S(x)")
    p.add_argument("--x", type=_real, required=True)

    p = sub.add_parser("li", help="Li(x) = int_2^x dt/log t")
    p.add_argument("--x", type=_real, required=True)

    p = sub.add_parser("coeffs", help="expansion coefficients a_1..a_n")
    p.add_argument("--n", type=int, required=True)

    p = sub.add_parser("constants", help="rigorous interval for C_f")
    p.add_argument("--f", choices=["prime", "prime-power", "lambda"], required=True)
    p.add_argument("--tol", type=_real, required=True)

    p = sub.add_parser("psisum", help="weighted sawtooth sum over (D, D']")
    p.add_argument("--x", type=_floored_int, required=True)
    p.add_argument("--d-lo", type=int, required=True)
    p.add_argument("--d-hi", type=int, required=True)
    p.add_argument("--delta", type=int, choices=[0, 1], required=True)
    p.add_argument("--weight", choices=["lambda", "logp", "prime"], required=True)

    p = sub.add_parser("remainder", help="remainder sum over (N, x/N]")
    p.add_argument("--x", type=_floored_int, required=True)
    p.add_argument("--n-param", type=int, required=True)
    p.add_argument("--delta", type=int, choices=[0, 1], required=True)
    p.add_argument("--f", choices=["prime", "prime-power", "lambda", "one"], required=True)

    p = sub.add_parser("scan", help="exact vs predicted over a geometric grid")
    p.add_argument("--quantity", choices=harness.QUANTITIES, required=True)
    p.add_argument("--from", dest="x_from", type=_floored_int, required=True)
    p.add_argument("--to", dest="x_to", type=_floored_int, required=True)
    p.add_argument("--points", type=int, required=True)
    p.add_argument("--normalizer", choices=harness.NORMALIZERS, default="sqrt_x")
    p.add_argument("--c", type=_real, default=1.0, help="constant of the pnt_envelope normalizer")
    p.add_argument("--q", type=int)
    p.add_argument("--a", type=int)
    p.add_argument("--predictor", choices=["strong", "weak"], default="strong")
    p.add_argument("--constant-source", choices=["series", "sieve"], default="series")
    p.add_argument("--sieve-limit", type=_floored_int)
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--out", default="-")

    p = sub.add_parser("fit", help="log-log slope of |delta| from a scan CSV/JSON")
    p.add_argument("--input", required=True)

    p = sub.add_parser("verify", help="block methods against the brute-force loop")
    p.add_argument("--max-x", type=_floored_int, required=True)
    p.add_argument("--samples", type=int, default=0)
    p.add_argument("--sample-max", type=_floored_int)
    p.add_argument("--seed", type=int, default=0)
    return parser


def _run(args: argparse.Namespace) -> int:
    cmd = args.command
    if cmd == "pi-s":
        print(exact.pi_S(args.x).value)
    elif cmd == "s-count":
        print(_fmt(exact.S_f(args.x, args.f.replace("-", "_")).value))
    elif cmd == "cardinality":
        print(floorset.cardinality(args.x))
    elif cmd == "progression":
        print(floorset.count_in_progression(args.x, args.q, args.a))
    elif cmd == "lis":
        if args.x < 4:
            print(f"warning: Li_S is empty for x < 4 (x = {args.x}); reporting 0", file=sys.stderr)
            print(_fmt(0.0))
        else:
            print(_fmt(asym.li_S(args.x)))
    elif cmd == "li":
        print(_fmt(asym.li(args.x)))
    elif cmd == "coeffs":
        for a in asym.coeffs(args.n).a:
            print(a)
    elif cmd == "constants":
        kind = args.f.replace("-", "_")
        table = sieve(asym.required_cutoff(kind, args.tol), threads=args.threads)
        interval = asym.constant(kind, args.tol, table)
        _dump({"f": kind, "lower": interval.lower, "upper": interval.upper, "cutoff": interval.cutoff})
    elif cmd == "psisum":
        weight = {"lambda": "lambda", "logp": "log_prime", "prime": "prime_indicator"}[args.weight]
        _dump(psisum.frak_S(args.x, args.d_lo, args.d_hi, args.delta, weight))
    elif cmd == "remainder":
        _dump(psisum.remainder_R(args.x, args.n_param, args.delta, args.f.replace("-", "_")))
    elif cmd == "scan":
        config = harness.ScanConfig(
            quantity=args.quantity,
            x_from=args.x_from,
            x_to=args.x_to,
            points=args.points,
            normalizer=args.normalizer,
            c=args.c,
            q=args.q,
            a=args.a,
            predictor=args.predictor,
            constant_source=args.constant_source,
            sieve_limit=args.sieve_limit,
        ).validate()
        records = harness.scan(config, threads=args.threads)
        harness.emit(records, args.format, args.out, config, harness.scan_constants(config))
    elif cmd == "fit":
        _dump(harness.fit_exponent(harness.read_records(args.input)))
    elif cmd == "verify":
        report = harness.verify(args.max_x, args.samples, args.sample_max, args.seed)
        _dump({"checked": report.checked, "ok": report.ok, "mismatches": report.mismatches})
        return 0 if report.ok else 1
    return 0


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.threads < 1:
        parser.print_usage(sys.stderr)
        print("error: --threads must be >= 1", file=sys.stderr)
        return 2
    try:
        return _run(args)
    except (FloorPrimesError, ValueError, OverflowError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
