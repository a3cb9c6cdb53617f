"""Command-line entry point: ``stlab <command> ...``."""
from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from pathlib import Path

from .angles import build_sequence, export_csv
from .config import load_config, parse_threads
from .discrepancy import (CONVENTIONS, NIEDERREITER, WindowPointSet, check_budget,
                          star_discrepancy, star_discrepancy_estimate)
from .errors import StlabError
from .figures import reproduce
from .measure import BUILTIN_NAMES, builtin_test_function
from .windows import REFERENCE_DIGITS, make_report, window_average

log = logging.getLogger("stlab")


def fmt_value(v):
    if isinstance(v, float):
        return format(v, ".17g")
    if isinstance(v, (list, tuple)):
        return " ".join(str(x) for x in v)
    if v is None:
        return ""
    return str(v)


def write_rows(rows: list[dict], fmt: str, out) -> None:
    if fmt == "json":
        for row in rows:
            out.write(json.dumps(row) + "\n")
        return
    if not rows:
        return
    w = csv.writer(out, lineterminator="\n")
    w.writerow(list(rows[0]))
    for row in rows:
        w.writerow([fmt_value(v) for v in row.values()])


def _global_options(parser, suppress):
    default = argparse.SUPPRESS if suppress else None
    parser.add_argument("--config", default=default, help="TOML configuration file")
    parser.add_argument("--cache-dir", default=default, help="trace cache directory")
    parser.add_argument("--threads", default=default, help="'auto' or a positive integer")
    parser.add_argument("--format", choices=("csv", "json"), default=default)
    parser.add_argument("--long", action="store_true",
                        default=argparse.SUPPRESS if suppress else False,
                        help="include long-running table cells")
    parser.add_argument("-v", "--verbose", action="store_true",
                        default=argparse.SUPPRESS if suppress else False)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stlab",
        description="Frobenius angles of elliptic curves and Sato-Tate pseudorandomness tests")
    _global_options(parser, suppress=False)
    common = argparse.ArgumentParser(add_help=False)
    _global_options(common, suppress=True)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("angles", parents=[common], help="export k,p,a,flag,x")
    p.add_argument("curve")
    p.add_argument("K", type=int)
    p.add_argument("-o", "--output", help="file to write (default stdout)")

    for name, hlp in (("average", "window average of a test function"),
                      ("relerr", "relative error and its log-slope")):
        p = sub.add_parser(name, parents=[common], help=hlp)
        p.add_argument("curve")
        p.add_argument("function", choices=BUILTIN_NAMES)
        p.add_argument("s", type=int)
        p.add_argument("K", type=int)
        p.add_argument("--reference-digits", type=int, default=REFERENCE_DIGITS,
                       help="significant digits of the reference integral "
                            "(default %(default)s, as in the published tables; 0 = full)")

    p = sub.add_parser("discrepancy", parents=[common], help="star discrepancy of windows")
    p.add_argument("curve")
    p.add_argument("s", type=int)
    p.add_argument("K", type=int)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--exact", dest="method", action="store_const", const="exact")
    g.add_argument("--estimate", dest="method", action="store_const", const="estimate")
    p.set_defaults(method="exact")
    p.add_argument("--convention", choices=CONVENTIONS, default=NIEDERREITER)
    p.add_argument("--samples", type=int, default=2000)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("reproduce", parents=[common], help="recompute a published table")
    p.add_argument("figure")
    p.add_argument("--rows", help="comma-separated curve labels")
    p.add_argument("--cols", help="comma-separated K values")
    return parser


def _config(args):
    cfg = load_config(args.config)
    if args.cache_dir:
        cfg.cache_dir = Path(args.cache_dir)
    if args.threads is not None:
        cfg.threads = parse_threads(args.threads)
    if args.format:
        cfg.output_format = args.format
    return cfg


def run(args, out) -> int:
    cfg = _config(args)
    fmt = cfg.output_format

    if args.command == "angles":
        seq = build_sequence(cfg.curve(args.curve), args.K, cfg.cache_dir,
                             cfg.thresholds, cfg.threads)
        target = open(args.output, "w", newline="") if args.output else out
        try:
            if fmt == "csv":
                export_csv(seq, target)
            else:
                rows = [{"k": i + 1, "p": int(seq.primes[i]), "a": int(seq.traces[i]),
                         "flag": "bad" if seq.bad[i] else "good",
                         "x": float(seq.angles[i])} for i in range(seq.length)]
                write_rows(rows, fmt, target)
        finally:
            if args.output:
                target.close()
        return 0

    if args.command in ("average", "relerr"):
        curve = cfg.curve(args.curve)
        f = builtin_test_function(args.function, args.s)
        seq = build_sequence(curve, args.K + f.s - 1, cfg.cache_dir,
                             cfg.thresholds, cfg.threads)
        emp = window_average(seq, f, args.K, cfg.threads)
        write_rows([make_report(curve.label, f, args.K, emp,
                                 args.reference_digits).as_dict()], fmt, out)
        return 0

    if args.command == "discrepancy":
        curve = cfg.curve(args.curve)
        if args.method == "exact":
            check_budget(args.s, args.K, cfg.budgets)
        seq = build_sequence(curve, args.K + args.s - 1, cfg.cache_dir,
                             cfg.thresholds, cfg.threads)
        pts = WindowPointSet.from_angles(seq, args.s, args.K)
        if args.method == "estimate":
            res = star_discrepancy_estimate(pts, args.samples, args.seed)
        else:
            res = star_discrepancy(pts, args.convention, cfg.budgets)
        row = {"curve_label": curve.label, **res.as_dict()}
        write_rows([row], fmt, out)
        return 0

    if args.command == "reproduce":
        rows = args.rows.split(",") if args.rows else None
        cols = [int(float(c)) for c in args.cols.split(",")] if args.cols else None
        cells = reproduce(args.figure, cfg, rows, cols, long=args.long)
        write_rows([c.as_dict() for c in cells], fmt, out)
        attempted = [c for c in cells if c.within_tol is not None]
        missed = [c for c in attempted if not c.within_tol]
        skipped = sum(c.skipped for c in cells)
        print(f"figure {args.figure}: {len(attempted) - len(missed)}/{len(attempted)} "
              f"cells within tolerance, {skipped} long cells skipped", file=sys.stderr)
        return 0
    return 2


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return run(args, sys.stdout)
    except StlabError as exc:
        print(f"stlab: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
