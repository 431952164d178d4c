"""Command-line interface.

Exit codes are stable: 0 valid, 1 invalid (or capacity failure), 2
divergence, 64 usage error, 65 unreadable or malformed input.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import certfile, fixtures
from .certfile import CertificateParseError
from .limits import DivergenceError, PackingSequence, brick_limit, extract_convergent_subsequence
from .packers import PACKERS, CapacityError, shrink_search
from .render import render_svg
from .shapes import MOSER_RECTANGLES, MOSER_SQUARES
from .verify import MODES, verify_packing

EXIT_VALID = 0
EXIT_INVALID = 1
EXIT_DIVERGENCE = 2
EXIT_USAGE = 64
EXIT_PARSE = 65

KINDS = {"rectangles": MOSER_RECTANGLES, "squares": MOSER_SQUARES,
         MOSER_RECTANGLES: MOSER_RECTANGLES, MOSER_SQUARES: MOSER_SQUARES}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_USAGE)


def _rational(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}")


def _kind(text: str) -> str:
    if text not in KINDS:
        raise argparse.ArgumentTypeError(f"kind must be one of {sorted(KINDS)}")
    return KINDS[text]


# commands -----------------------------------------------------------------------


def cmd_pack(args) -> int:
    if args.n < 1 or (args.kind == MOSER_SQUARES and args.n < 2):
        raise UsageError(f"N={args.n} is too small for {args.kind}")
    try:
        cert = PACKERS[args.kind](args.n, args.param)
    except CapacityError as exc:
        print(f"capacity failure at piece {exc.index}")
        return EXIT_INVALID
    except ValueError as exc:
        raise UsageError(str(exc))
    certfile.save(cert, args.out)
    report = verify_packing(cert)
    print(f"wrote {args.out} pieces={len(cert.placements)} coverage={report.coverage_ratio} "
          f"(~{float(report.coverage_ratio):.6f})")
    return EXIT_VALID


def cmd_verify(args) -> int:
    cert = certfile.load(args.path)
    if args.mode_override:
        cert = cert.with_mode(args.mode_override)
    report = verify_packing(cert, args.slack)
    print(report.summary())
    for v in report.violations:
        print(v.line())
    for v in report.indeterminate:
        print("indeterminate " + v.line())
    return EXIT_VALID if report.valid is True else EXIT_INVALID


def cmd_limit(args) -> int:
    certs = [certfile.load(p) for p in args.paths]
    try:
        seq = PackingSequence.from_certificates(certs)
    except ValueError as exc:
        raise UsageError(str(exc))
    if len(certs) < args.min_keep:
        raise UsageError(f"need at least {args.min_keep} certificates")
    try:
        rep = extract_convergent_subsequence(seq, tol=args.tol, min_keep=args.min_keep)
    except DivergenceError as exc:
        print(str(exc))
        return EXIT_DIVERGENCE
    except ValueError as exc:
        raise UsageError(str(exc))
    certfile.save(rep.limit, args.out)
    report_path = Path(args.report) if args.report else Path(str(args.out) + ".report.json")
    report_path.write_text(json.dumps(rep.to_dict(), indent=1) + "\n", encoding="utf-8")
    print(f"kept={len(rep.kept_indices)} diameter={rep.cluster_diameter:.3g} "
          f"slack={rep.certified_slack:.3g} {rep.verdict.summary()}")
    return EXIT_VALID if rep.verdict.valid is True else EXIT_INVALID


def cmd_render(args) -> int:
    cert = certfile.load(args.path)
    if cert.dim != 2:
        raise UsageError("only 2-dimensional certificates can be rendered")
    Path(args.out).write_text(render_svg(cert), encoding="utf-8")
    return EXIT_VALID


def read_dims_csv(path) -> list:
    rows = []
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            for row in csv.reader(fh):
                cells = [c.strip() for c in row if c.strip()]
                if not cells or cells[0].startswith("#"):
                    continue
                rows.append(tuple(Fraction(c) for c in cells))
    except (OSError, ValueError, ZeroDivisionError) as exc:
        raise CertificateParseError(f"bad CSV {path}: {exc}") from exc
    if not rows:
        raise CertificateParseError(f"no rows in {path}")
    if len({len(r) for r in rows}) != 1:
        raise CertificateParseError("rows have different lengths")
    if any(d <= 0 for r in rows for d in r):
        raise CertificateParseError("dims must be positive")
    return rows


def cmd_brick_limit(args) -> int:
    rows = read_dims_csv(args.csv)
    print(brick_limit(rows, args.window).text())
    return EXIT_VALID


def cmd_shrink(args) -> int:
    try:
        res = shrink_search(args.kind, args.n, args.lo, args.hi, args.steps)
    except CapacityError as exc:
        print(f"infeasible at hi: capacity failure at piece {exc.index}")
        return EXIT_INVALID
    except ValueError as exc:
        raise UsageError(str(exc))
    print(res.text())
    if args.out:
        certfile.save(res.certificate, args.out)
    return EXIT_VALID


FIXTURES = {
    "tiling": lambda: [fixtures.tiling_2x2()],
    "overlap": lambda: [fixtures.overlapping_2x2()],
    "reflection": lambda: [fixtures.reflected_square()],
    "homothet-float": lambda: fixtures.homothet_sequence(arithmetic="float"),
    "homothet-exact": lambda: fixtures.homothet_sequence(arithmetic="exact"),
    "funnel": fixtures.funnel_sequence,
}


def cmd_fixture(args) -> int:
    out = Path(args.outdir)
    out.mkdir(parents=True, exist_ok=True)
    for k, cert in enumerate(FIXTURES[args.name](), start=1):
        path = out / f"{args.name}-{k:03d}.json"
        certfile.save(cert, path)
        print(path)
    return EXIT_VALID


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="packlimit", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("pack", help="pack a truncated Moser family")
    p.add_argument("kind", type=_kind)
    p.add_argument("n", type=int)
    p.add_argument("param", type=_rational, help="square side (rectangles) or width (squares)")
    p.add_argument("-o", "--out", required=True)
    p.set_defaults(func=cmd_pack)

    p = sub.add_parser("verify", help="verify a certificate file")
    p.add_argument("path")
    p.add_argument("--mode-override", choices=MODES)
    p.add_argument("--slack", type=float, default=0.0)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("limit", help="extract a limit packing from a sequence of certificates")
    p.add_argument("paths", nargs="+")
    p.add_argument("--tol", type=float, default=1e-7)
    p.add_argument("--min-keep", type=int, default=3)
    p.add_argument("-o", "--out", required=True)
    p.add_argument("--report")
    p.set_defaults(func=cmd_limit)

    p = sub.add_parser("render", help="draw a planar certificate as SVG")
    p.add_argument("path")
    p.add_argument("-o", "--out", required=True)
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("brick-limit", help="limsup brick of a CSV of brick dims")
    p.add_argument("csv")
    p.add_argument("--window", type=int, default=50)
    p.set_defaults(func=cmd_brick_limit)

    p = sub.add_parser("shrink", help="bisect for the smallest feasible side or width")
    p.add_argument("kind", type=_kind)
    p.add_argument("n", type=int)
    p.add_argument("lo", type=_rational)
    p.add_argument("hi", type=_rational)
    p.add_argument("--steps", type=int, default=20)
    p.add_argument("-o", "--out")
    p.set_defaults(func=cmd_shrink)

    p = sub.add_parser("fixture", help="write a demo certificate or certificate sequence")
    p.add_argument("name", choices=sorted(FIXTURES))
    p.add_argument("outdir")
    p.set_defaults(func=cmd_fixture)
    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CertificateParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
