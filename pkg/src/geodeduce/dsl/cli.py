"""Command line: ``geodeduce solve|locus|selftest``.

Exit codes: 0 success, 1 answer mismatch, 2 parse error, 3 engine error
(resource budget, degeneracy, inconsistency, missing corpus files).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from ..errors import GeoDeduceError, ParseError
from ..locus import write_points_csv
from ..prover import MATCH_TOL
from .parser import parse_script
from .runner import corpus_selftest, format_selftest, run

EXIT_OK, EXIT_MISMATCH, EXIT_PARSE, EXIT_ENGINE = 0, 1, 2, 3


def _region(text: str) -> tuple[float, float, float, float]:
    try:
        vals = tuple(float(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError("region must be x0,y0,x1,y1") from None
    if len(vals) != 4 or vals[0] >= vals[2] or vals[1] >= vals[3]:
        raise argparse.ArgumentTypeError("region must be x0,y0,x1,y1 with x0 < x1 and y0 < y1")
    return vals


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="geodeduce", description="Exact answers for constructed geometry problems.")
    sub = ap.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve", help="run every query in a script")
    solve.add_argument("file", type=Path)
    solve.add_argument("--seed", type=int, default=0)
    solve.add_argument("--json", action="store_true", help="print the JSON report")
    solve.add_argument("--no-pin-second", action="store_true", help="pin only the first free point")
    solve.add_argument("--tol", type=float, default=MATCH_TOL, help="root matching tolerance")

    locus = sub.add_parser("locus", help="run a script and write locus sample points as CSV")
    locus.add_argument("file", type=Path)
    locus.add_argument("--emit-points", type=Path, required=True, metavar="OUT.csv")
    locus.add_argument("--region", type=_region, default=None, metavar="x0,y0,x1,y1")
    locus.add_argument("--seed", type=int, default=0)
    locus.add_argument("--json", action="store_true")

    selftest = sub.add_parser("selftest", help="check the bundled corpus against its expected answers")
    selftest.add_argument("--corpus", type=Path, default=None, help="alternative corpus directory")
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "selftest":
            rows = corpus_selftest(args.corpus)
            print(format_selftest(rows))
            return EXIT_OK if all(r.ok for r in rows) else EXIT_MISMATCH

        script = parse_script(args.file.read_bytes())
        if args.command == "solve":
            report = run(script, seed=args.seed, pin_two_points=not args.no_pin_second, tol=args.tol)
        else:
            report = run(script, seed=args.seed, region=args.region)
            pts = report.locus_points()
            if args.region is not None:
                x0, y0, x1, y1 = args.region
                pts = [(x, y) for x, y in pts if x0 <= x <= x1 and y0 <= y <= y1]
            with open(args.emit_points, "w", encoding="utf-8", newline="") as fh:
                write_points_csv(pts, fh)
        print(report.to_json() if args.json else report.text())
        return EXIT_OK
    except ParseError as exc:
        print(f"{getattr(args, 'file', '<script>')}:{exc}", file=sys.stderr)
        return EXIT_PARSE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ENGINE
    except GeoDeduceError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ENGINE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
