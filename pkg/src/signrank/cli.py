"""Command-line front end.

Exit codes: 0 success, 1 usage error, 2 data error (zeros, ties, bad input
files), 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass

import numpy as np

from .distributions import parse_density
from .errors import DataError, InfiniteMeanError, NumericalError
from .nonserial import RegressionDesign, nonserial_test_statistic
from .scores import BUILTIN_NAMES, ScoreTable, builtin_scores
from .simulation import (
    DEFAULT_THETA_GRID,
    STATISTICS,
    null_z_scores,
    plot_power_curves,
    power_study,
    read_power_csv,
    write_power_csv,
)
from .testing import DEFAULT_ALPHA, two_sided_test

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 1, 2, 3
FAST_REPS = 300


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


@dataclass(frozen=True)
class RunConfig:
    """Validated options of one invocation."""

    subcommand: str
    density: str | None = None
    stats: tuple[str, ...] = ()
    n: int | None = None
    reps: int | None = None
    alpha: float = DEFAULT_ALPHA
    seed: int = 0
    input: str | None = None
    output: str | None = None
    fmt: str = "csv"


def _alpha(text: str) -> float:
    v = float(text)
    if not 0 < v < 1:
        raise argparse.ArgumentTypeError("alpha must lie in (0, 1)")
    return v


def _seed(text: str) -> int:
    v = int(text)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be a 64-bit unsigned integer")
    return v


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("expected a positive integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="signrank", description="Sign-and-rank tests and power studies.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("scores", help="tabulate sign-and-rank scores")
    s.add_argument("--n", type=_positive, required=True)
    s.add_argument("--phi", required=True, help=f"one of {', '.join(BUILTIN_NAMES)}")
    s.add_argument("--flavor", choices=("exact", "approx"), default="approx")
    s.add_argument("--format", choices=("csv", "json-lines"), default="csv")
    s.add_argument("--out")

    t = sub.add_parser("test", help="test randomness of series read from a CSV file")
    tsub = t.add_subparsers(dest="kind", required=True, parser_class=_Parser)
    tn = tsub.add_parser("nonserial", help="median-regression / location sign-and-rank test")
    tn.add_argument("--input", required=True, help="CSV, one series per column")
    tn.add_argument("--design", help="CSV with one column of regression constants (default: all ones)")
    tn.add_argument("--phi", default="vdw")
    tn.add_argument("--flavor", choices=("exact", "approx"), default="approx")
    tn.add_argument("--alpha", type=_alpha, default=DEFAULT_ALPHA)
    tn.add_argument("--format", choices=("csv", "json-lines"), default="csv")
    tn.add_argument("--out")
    ts = tsub.add_parser("serial", help="lag-one randomness test")
    ts.add_argument("--stat", choices=STATISTICS, required=True)
    ts.add_argument("--input", required=True, help="CSV, one series per column")
    ts.add_argument("--alpha", type=_alpha, default=DEFAULT_ALPHA)
    ts.add_argument("--format", choices=("csv", "json-lines"), default="csv")
    ts.add_argument("--out")

    w = sub.add_parser("power", help="Monte Carlo power study on MA(1) series")
    w.add_argument("--density", required=True, help="figure letter a-f or a density spec")
    w.add_argument("--stats", default="all", help="'all' or a comma-separated subset of " + ",".join(STATISTICS))
    w.add_argument("--n", type=_positive, default=250)
    w.add_argument("--reps", type=_positive, default=1000)
    w.add_argument("--alpha", type=_alpha, default=DEFAULT_ALPHA)
    w.add_argument("--seed", type=_seed, default=0)
    w.add_argument("--theta", help="comma-separated theta grid, e.g. --theta=-0.1,0,0.1 (default: the 13-point grid)")
    w.add_argument("--out", required=True, help="CSV output path ('-' for stdout)")
    w.add_argument("--svg", help="optional SVG figure path")
    w.add_argument("--fast", action="store_true", help=f"use {FAST_REPS} replications")
    w.add_argument("--crn", action="store_true", help="common random numbers across theta")
    w.add_argument("--workers", type=_positive, default=1)

    g = sub.add_parser("plot", help="render a power CSV as SVG")
    g.add_argument("--input", required=True)
    g.add_argument("--out", required=True)
    return p


def read_series_csv(path: str) -> tuple[list[str], np.ndarray]:
    """Header row of names, then one numeric row per time point; returns ``(names, columns)``."""
    try:
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    rows = [r for r in rows if r]
    if len(rows) < 2:
        raise DataError(f"{path}: need a header row and at least one data row")
    names = [h.strip() for h in rows[0]]
    data = []
    for lineno, r in enumerate(rows[1:], start=2):
        if len(r) != len(names) or any(c.strip() == "" for c in r):
            raise DataError(f"{path}:{lineno}: missing cells are not allowed")
        try:
            data.append([float(c) for c in r])
        except ValueError as exc:
            raise DataError(f"{path}:{lineno}: {exc}") from exc
    return names, np.array(data, dtype=float).T


def _emit(records: list[dict], fields: tuple[str, ...], fmt: str, out: str | None) -> None:
    buf = io.StringIO()
    if fmt == "csv":
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(fields)
        for rec in records:
            w.writerow([_fmt(rec[f]) for f in fields])
    else:
        for rec in records:
            buf.write(json.dumps({f: rec[f] for f in fields}) + "\n")
    _write(buf.getvalue(), out)


def _fmt(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return v


def _write(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w", newline="") as fh:
            fh.write(text)


def _scores(args) -> None:
    phi = builtin_scores(args.phi)
    table = ScoreTable(args.n, phi, args.flavor)
    records = [{"branch": b, "nu": nu, "i": i, "value": v} for b, nu, i, v in table.entries()]
    _emit(records, ("branch", "nu", "i", "value"), args.format, args.out)


_TEST_FIELDS = ("name", "z", "p", "alpha", "reject")


def _test(args) -> None:
    names, cols = read_series_csv(args.input)
    records = []
    if args.kind == "nonserial":
        n = cols.shape[1]
        if args.design:
            _, dcols = read_series_csv(args.design)
            if dcols.shape[0] != 1:
                raise DataError("design file must hold exactly one column")
            design = RegressionDesign(dcols[0])
        else:
            design = RegressionDesign.constant(n)
        table = ScoreTable(n, builtin_scores(args.phi), args.flavor)
        for name, z in zip(names, cols):
            res = nonserial_test_statistic(z, design, table)
            records.append(two_sided_test(res.z, args.alpha, name).as_dict())
    else:
        for name, z in zip(names, cols):
            zval = float(null_z_scores(args.stat, z)[0])
            records.append(two_sided_test(zval, args.alpha, name).as_dict())
    _emit(records, _TEST_FIELDS, args.format, args.out)


def _power(args) -> None:
    stats = STATISTICS if args.stats == "all" else tuple(s.strip() for s in args.stats.split(","))
    bad = [s for s in stats if s not in STATISTICS]
    if bad:
        raise UsageError(f"unknown statistics {bad}; expected a subset of {STATISTICS}")
    theta = DEFAULT_THETA_GRID
    if args.theta:
        theta = tuple(float(t) for t in args.theta.split(","))
    reps = FAST_REPS if args.fast else args.reps
    curves = power_study(
        parse_density(args.density), stats, theta, args.n, reps, args.alpha, args.seed,
        crn=args.crn, workers=args.workers,
    )
    _write(write_power_csv(curves), args.out)
    if args.svg:
        plot_power_curves(curves, args.svg)


def _plot(args) -> None:
    try:
        curves = read_power_csv(args.input)
    except (OSError, KeyError) as exc:
        raise DataError(f"cannot read {args.input}: {exc}") from exc
    plot_power_curves(curves, args.out)


def run(argv=None) -> int:
    """Parse ``argv`` and dispatch; returns the process exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        handler = {"scores": _scores, "test": _test, "power": _power, "plot": _plot}[args.command]
        handler(args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except (DataError, InfiniteMeanError) as exc:
        print(f"signrank: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except NumericalError as exc:
        print(f"signrank: numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"signrank: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


def main() -> None:
    sys.exit(run())
