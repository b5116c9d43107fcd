"""Command-line front end.

Subcommands: sample (JSONL polygons), stats (moment CSV), tv (binned TV
CSV, optional grid-cell CSV), bounds (bound-value CSV), verify (the full
check suite), density-check (matrix-density checks CSV).

Every command takes --seed (default 7) and is byte-deterministic given its
flags; --workers only changes scheduling. Exit codes: 0 success, 1 failed
verification checks, 2 usage or domain errors.
"""
from __future__ import annotations

import argparse
import contextlib
import sys

import numpy as np

from . import bounds
from .errors import SymmpolyError
from .ensembles import estimate_tv, run_ensemble, segment_samples
from .io import write_csv, write_ensemble
from .polygons import SPACES, Polygon, space_dim
from .verify import (extended_density_checks, format_check_line, run_verify,
                     write_results_csv)

DEFAULT_SEED = 7

_COUNTERPART = {"arm2": "pol2", "pol2": "arm2", "arm3": "pol3", "pol3": "arm3"}

STATS_HEADER = ("space", "n", "count", "seed", "functional", "mean",
                "variance", "std_error", "excluded")
TV_HEADER = ("space_a", "space_b", "n", "k", "count", "bins_per_axis", "seed",
             "tv_estimate", "null_calibration")
BOUNDS_HEADER = ("family", "k", "n", "value", "clipped", "asymptote_coeff")
DENSITY_HEADER = ("check", "statistic", "threshold", "pass")


@contextlib.contextmanager
def _out_stream(path):
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8", newline="") as handle:
            yield handle


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="symmpoly",
        description="Random polygons from the symmetric measure: sampling, "
                    "functionals, TV bounds, and their verification.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, *, space=False, n=False, count=None, k=False,
                   bins=None, workers=False, out_default=None):
        if space:
            p.add_argument("--space", required=True, choices=SPACES,
                           help="polygon space to sample")
        if n:
            p.add_argument("--n", type=int, required=True,
                           help="number of edges")
        if count is not None:
            p.add_argument("--count", type=int, default=count,
                           help=f"number of samples (default {count})")
        if k:
            p.add_argument("--k", type=int, default=1,
                           help="segment length in edges (default 1)")
        if bins is not None:
            p.add_argument("--bins", type=int, default=bins,
                           help=f"histogram bins per axis (default {bins})")
        p.add_argument("--seed", type=int, default=DEFAULT_SEED,
                       help=f"master seed (default {DEFAULT_SEED})")
        if workers:
            p.add_argument("--workers", type=int, default=1,
                           help="worker processes; never changes output bytes")
        p.add_argument("--out", default=out_default,
                       help="output path (default stdout)" if out_default is None
                       else f"output path (default {out_default})")

    p = sub.add_parser("sample", help="write sampled polygons as JSONL")
    add_common(p, space=True, n=True, count=10, workers=True)
    p.set_defaults(func=_cmd_sample)

    p = sub.add_parser("stats", help="moment estimates of the builtin functionals")
    add_common(p, space=True, n=True, count=10_000, workers=True)
    p.set_defaults(func=_cmd_stats)

    p = sub.add_parser("tv", help="binned TV between k-segment marginals")
    add_common(p, space=True, n=True, count=100_000, k=True, bins=8,
               workers=True)
    p.add_argument("--space-b", choices=SPACES, default=None,
                   help="second space (default: the open/closed counterpart)")
    p.add_argument("--cells-out", default=None,
                   help="optional CSV path for per-cell grid counts")
    p.set_defaults(func=_cmd_tv)

    p = sub.add_parser("bounds", help="closed-form segment TV bound values")
    p.add_argument("--dim", type=int, required=True, choices=(2, 3),
                   help="ambient dimension")
    p.add_argument("--k", type=int, default=None,
                   help="segment length (default: sweep k = 1..min(10, n-5))")
    p.add_argument("--n", type=int, required=True, help="number of edges")
    p.add_argument("--out", default=None, help="output path (default stdout)")
    p.set_defaults(func=_cmd_bounds)

    p = sub.add_parser("verify", help="run the full verification suite")
    p.add_argument("--level", choices=("desk", "deep"), default="desk",
                   help="desk: default sample counts; deep: 10x")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED,
                   help=f"master seed (default {DEFAULT_SEED})")
    p.add_argument("--workers", type=int, default=1,
                   help="worker processes; never changes output bytes")
    p.add_argument("--out", default="verify_results.csv",
                   help="CSV path for check results (default verify_results.csv)")
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("density-check",
                       help="matrix-density normalization and law checks")
    p.add_argument("--count", type=int, default=100_000,
                   help="samples per law-agreement check (default 100000)")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED,
                   help=f"master seed (default {DEFAULT_SEED})")
    p.add_argument("--out", default=None, help="output path (default stdout)")
    p.set_defaults(func=_cmd_density_check)

    return parser


def _cmd_sample(args) -> int:
    dim = space_dim(args.space)
    closed = args.space.startswith("pol")
    flat = segment_samples(args.space, args.n, args.n, args.count, args.seed,
                           workers=args.workers)
    polygons = [Polygon(dim=dim, closed=closed,
                        edges=flat[i].reshape(args.n, dim))
                for i in range(args.count)]
    with _out_stream(args.out) as fh:
        write_ensemble(fh, polygons)
    return 0


def _cmd_stats(args) -> int:
    if space_dim(args.space) == 2:
        functionals = ["theta1", "total_curvature"]
    else:
        functionals = ["theta1", "tau1", "total_curvature", "total_torsion"]
    summary = run_ensemble(args.space, args.n, args.count, functionals,
                           args.seed, workers=args.workers)
    rows = [(summary.space, summary.n, summary.count, summary.seed, rec.name,
             rec.mean, rec.variance, rec.std_error, summary.excluded)
            for rec in summary.records]
    with _out_stream(args.out) as fh:
        write_csv(fh, STATS_HEADER, rows)
    return 0


def _cmd_tv(args) -> int:
    space_b = args.space_b or _COUNTERPART[args.space]
    hist = estimate_tv(args.space, space_b, args.n, args.k, args.count,
                       args.bins, args.seed, workers=args.workers)
    row = (args.space, space_b, args.n, args.k, args.count,
           hist.bins_per_axis, args.seed, hist.tv_estimate,
           hist.null_calibration)
    with _out_stream(args.out) as fh:
        write_csv(fh, TV_HEADER, [row])
    if args.cells_out is not None:
        header = (["cell"] + [f"axis{i}" for i in range(hist.dim)]
                  + ["count_a", "count_b"])
        flat_a = hist.counts_a.ravel()
        flat_b = hist.counts_b.ravel()
        rows = [[cell] + list(idx) + [int(flat_a[cell]), int(flat_b[cell])]
                for cell, idx in enumerate(np.ndindex(hist.counts_a.shape))]
        with _out_stream(args.cells_out) as fh:
            write_csv(fh, header, rows)
    return 0


def _cmd_bounds(args) -> int:
    family = "b2" if args.dim == 2 else "b3"
    if args.k is not None:
        ks = [args.k]
    else:
        top = min(10, args.n - 5)
        if top < 1:
            raise SymmpolyError(f"no valid segment length for n={args.n}; needs n >= 6")
        ks = list(range(1, top + 1))
    rows = []
    for k in ks:
        ev = bounds.evaluate(family, k=k, n=args.n)
        if not ev.valid:
            raise SymmpolyError(
                f"{family}(k={k}, n={args.n}) is outside the bound's validity range")
        rows.append((ev.family, k, args.n, ev.value, ev.clipped,
                     ev.asymptote_coeff))
    with _out_stream(args.out) as fh:
        write_csv(fh, BOUNDS_HEADER, rows)
    return 0


def _cmd_verify(args) -> int:
    results = run_verify(args.level, args.seed, args.workers)
    for r in results:
        print(format_check_line(r))
    failed = [r for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} checks passed")
    write_results_csv(args.out, results)
    return 1 if failed else 0


def _cmd_density_check(args) -> int:
    results = extended_density_checks(args.seed, args.count)
    rows = [(r.name, r.measured, r.threshold, r.passed) for r in results]
    with _out_stream(args.out) as fh:
        write_csv(fh, DENSITY_HEADER, rows)
    return 1 if any(not r.passed for r in results) else 0


def run(argv) -> int:
    """Parse argv and execute; returns the process exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(list(argv))
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 0
    try:
        return args.func(args)
    except SymmpolyError as exc:
        print(f"symmpoly: {exc}", file=sys.stderr)
        return 2
    except RuntimeError as exc:
        print(f"symmpoly: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run(sys.argv[1:]))
