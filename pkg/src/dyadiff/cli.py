"""Command-line front end.

Subcommands: delta, distance, ball, profile, evolve, verify.  Single results
are emitted as JSON documents, tables as whitespace-separated rows with a
`#` header line.  Decimal inputs are rounded to binary at a configurable
digit count and the applied rounding is always echoed, making the exactness
boundary of the dyadic layer visible.

Exit codes: 0 success, 2 parse error, 3 range error, 4 series cap exceeded,
5 verification failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

from . import laplacian, spectral, verify
from .dyadic import DyadicPoint, dyadic_distance, smallest_common_interval
from .exceptions import CapExceeded, ExpansionParseError
from .spectral import DiffusionParams, TruncationPolicy

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_RANGE = 3
EXIT_CAP = 4
EXIT_VERIFY = 5

DEFAULT_DIGITS = 53


def _fmt(v: float) -> str:
    return f"{float(v):.17g}"


def parse_point(text: str, digits: int) -> tuple[DyadicPoint, Fraction]:
    """Parse a decimal string, round to `digits` binary digits.

    Returns the point and the (signed) rounding that was applied.
    """
    try:
        value = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise ExpansionParseError(0, f"cannot parse {text!r} as a real number") from None
    if value < 0:
        raise ValueError(f"input {text!r} is negative; points live on the half-line")
    scale = 1 << digits
    rounded = Fraction(round(value * scale), scale)
    point = DyadicPoint.from_fraction(rounded)
    return point, rounded - value


def _trunc_from_args(args) -> TruncationPolicy:
    tail_tol = args.tail_tol
    if tail_tol is None:
        tail_tol = float(os.environ.get("DYADIFF_TAIL_TOL", 1e-12))
    max_depth = args.max_depth
    if max_depth is None:
        max_depth = int(os.environ.get("DYADIFF_MAX_DEPTH", 200))
    return TruncationPolicy(tail_tol=tail_tol, max_depth=max_depth)


def _interval_record(interval) -> dict:
    return {
        "level": interval.level,
        "index": interval.index,
        "lower": _fmt(interval.lower),
        "upper": _fmt(interval.upper),
    }


def _point_record(label: str, text: str, point: DyadicPoint, rounding: Fraction) -> dict:
    return {
        "input": text,
        "value": _fmt(point.value),
        "mantissa": point.mantissa,
        "exponent": point.exponent,
        "rounding_applied": _fmt(rounding),
    }


def _emit(doc: dict, out) -> None:
    json.dump(doc, out, indent=2)
    out.write("\n")


def cmd_delta(args, out) -> int:
    x, rx = parse_point(args.x, args.digits)
    y, ry = parse_point(args.y, args.digits)
    delta = dyadic_distance(x, y)
    common = smallest_common_interval(x, y)
    doc = {
        "command": "delta",
        "x": _point_record("x", args.x, x, rx),
        "y": _point_record("y", args.y, y, ry),
        "delta": _fmt(delta),
        "interval": _interval_record(common) if common is not None else "point",
    }
    _emit(doc, out)
    return EXIT_OK


def cmd_distance(args, out) -> int:
    x, rx = parse_point(args.x, args.digits)
    y, ry = parse_point(args.y, args.digits)
    params = DiffusionParams(args.s, args.t)
    trunc = _trunc_from_args(args)
    doc = {
        "command": "distance",
        "x": _point_record("x", args.x, x, rx),
        "y": _point_record("y", args.y, y, ry),
        "s": _fmt(args.s),
        "t": _fmt(args.t),
        "method": args.method,
    }
    if args.method in ("closed", "both"):
        doc["closed"] = _fmt(spectral.distance_closed(x, y, params, trunc))
    if args.method in ("spectral", "both"):
        doc["spectral"] = _fmt(spectral.distance_spectral(x, y, params, trunc))
    if args.method == "both":
        doc["discrepancy"] = _fmt(
            abs(float(doc["closed"]) - float(doc["spectral"]))
        )
    _emit(doc, out)
    return EXIT_OK


def cmd_ball(args, out) -> int:
    x, rx = parse_point(args.x, args.digits)
    if not (args.r > 0):
        raise ValueError("radius must be positive")
    params = DiffusionParams(args.s, args.t)
    trunc = _trunc_from_args(args)
    result = spectral.ball(x, args.r, params, trunc)
    doc = {
        "command": "ball",
        "x": _point_record("x", args.x, x, rx),
        "r": _fmt(args.r),
        "s": _fmt(args.s),
        "t": _fmt(args.t),
    }
    if result.is_whole_space:
        doc["ball"] = "whole_space"
    else:
        doc["ball"] = _interval_record(result.interval)
    _emit(doc, out)
    return EXIT_OK


def cmd_profile(args, out) -> int:
    if args.i_min > args.i_max:
        raise ValueError("i-min must not exceed i-max")
    params = DiffusionParams(args.s, args.t)
    trunc = _trunc_from_args(args)
    lo, limit, hi = spectral.sandwich(params, trunc)
    out.write("# i lambda psi\n")
    for i in range(args.i_min, args.i_max + 1):
        lam = Fraction(2) ** i
        out.write(f"{i} {_fmt(lam)} {_fmt(spectral.psi(params, lam, trunc))}\n")
    out.write(f"# psi_infinity {_fmt(limit)}\n")
    out.write(f"# sandwich_lower {_fmt(lo)}\n")
    out.write(f"# sandwich_upper {_fmt(hi)}\n")
    return EXIT_OK


def cmd_evolve(args, out) -> int:
    with open(args.input, "r", encoding="utf-8") as fh:
        expansion = laplacian.parse_expansion(fh.read())
    trunc = _trunc_from_args(args)
    # t = 0 is the identity (multiplier e^0 = 1 on every level); the general
    # spectral machinery requires t > 0, so handle it directly.
    if args.t == 0:
        params = None
        evolved = expansion
    else:
        params = DiffusionParams(args.s, args.t)
        evolved = laplacian.evolve_spectral(expansion, params)
    if args.out is not None:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(laplacian.format_expansion(evolved))
    else:
        out.write(laplacian.format_expansion(evolved))
    if args.query:
        f = expansion.to_piecewise()
        out.write("# x u_spectral u_kernel discrepancy\n")
        for text in args.query:
            x, _ = parse_point(text, args.digits)
            u_spec = evolved.evaluate(x)
            if params is None:
                u_kernel = f.evaluate(x)
            else:
                u_kernel = laplacian.evolve_pointwise(f, x, params, trunc)
            out.write(
                f"{_fmt(x.value)} {_fmt(u_spec)} {_fmt(u_kernel)} "
                f"{_fmt(abs(u_spec - u_kernel))}\n"
            )
    return EXIT_OK


def cmd_verify(args, out) -> int:
    results = verify.run_verify(args.suite, seed=args.seed)
    failures = 0
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        detail = f"  ({r.detail})" if r.detail else ""
        out.write(f"[{status}] {r.suite}: {r.name}{detail}\n")
        if not r.passed:
            failures += 1
    out.write(f"# {len(results) - failures}/{len(results)} properties passed\n")
    return EXIT_OK if failures == 0 else EXIT_VERIFY


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dyadiff",
        description="Fractional dyadic diffusion geometry on the half-line",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, with_params=True):
        p.add_argument("--digits", type=int, default=DEFAULT_DIGITS,
                       help="binary digits kept when rounding decimal inputs")
        p.add_argument("--tail-tol", type=float, default=None,
                       help="absolute tail tolerance for truncated series")
        p.add_argument("--max-depth", type=int, default=None,
                       help="finest wavelet level enumerated in spectral sums")
        if with_params:
            p.add_argument("--s", type=float, required=True, help="fractional order s > 0")
            p.add_argument("--t", type=float, required=True, help="diffusion time t > 0")

    p = sub.add_parser("delta", help="dyadic distance and minimal common interval")
    p.add_argument("x")
    p.add_argument("y")
    add_common(p, with_params=False)
    p.set_defaults(func=cmd_delta)

    p = sub.add_parser("distance", help="diffusion distance d_t(x, y)")
    p.add_argument("x")
    p.add_argument("y")
    add_common(p)
    p.add_argument("--method", choices=("closed", "spectral", "both"), default="closed")
    p.set_defaults(func=cmd_distance)

    p = sub.add_parser("ball", help="diffusion ball around x of radius r")
    p.add_argument("x")
    p.add_argument("r", type=float)
    add_common(p)
    p.set_defaults(func=cmd_ball)

    p = sub.add_parser("profile", help="table of psi_t over powers of 2")
    add_common(p)
    p.add_argument("--i-min", type=int, default=-20)
    p.add_argument("--i-max", type=int, default=20)
    p.set_defaults(func=cmd_profile)

    p = sub.add_parser("evolve", help="heat evolution of a Haar expansion file")
    p.add_argument("input", help="expansion file: one `j k coefficient` per line")
    add_common(p)
    p.add_argument("--query", nargs="*", default=[],
                   help="points at which to evaluate both evolution routes")
    p.add_argument("--out", default=None, help="write the evolved expansion here")
    p.set_defaults(func=cmd_evolve)

    p = sub.add_parser("verify", help="run the seeded property suites")
    p.add_argument("suite", nargs="?", default="all",
                   choices=("all",) + verify.SUITES)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_verify)

    return parser


def main(argv=None, out=None) -> int:
    out = out if out is not None else sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits with 2 on bad flags, which matches our parse code
        return EXIT_PARSE if exc.code else EXIT_OK
    try:
        return args.func(args, out)
    except ExpansionParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except FileNotFoundError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except CapExceeded as exc:
        print(f"cap exceeded: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (ValueError, OverflowError) as exc:
        print(f"range error: {exc}", file=sys.stderr)
        return EXIT_RANGE


def app() -> None:
    raise SystemExit(main())
