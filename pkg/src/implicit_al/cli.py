"""Command-line driver for the start-point grid study.

Example::

    implicit-al-bench --formulation implicit --grid-n 51 --format csv --out runs.csv

Exit status is 0 iff every run ended with a terminal status (solved or
infeasible_stationary), 1 if some run did not, 2 on usage or I/O errors.
"""

import argparse
import json
import logging
import os
import sys

from .bench import aggregate, emit_report, run_grid
from .errors import ParameterError
from .inner import Direction, InnerSettings
from .mpvc import Formulation
from .outer import OuterSettings

log = logging.getLogger("implicit_al.bench")

PROBLEMS = ("mpvca",)


def build_parser():
    p = argparse.ArgumentParser(
        prog="implicit-al-bench",
        description="Grid-of-starts benchmark of the implicit AL solver on the vanishing-constraints problem.",
    )
    p.add_argument("--problem", choices=PROBLEMS, default="mpvca")
    p.add_argument("--formulation", choices=[f.value for f in Formulation], default="implicit")
    p.add_argument("--grid-n", type=int, default=51, help="points per axis (default 51)")
    p.add_argument("--lo", type=float, default=-5.0)
    p.add_argument("--hi", type=float, default=20.0)
    p.add_argument("--eps-prim", type=float, default=1e-8)
    p.add_argument("--eps-dual", type=float, default=1e-8)
    p.add_argument("--mu0", type=float, default=10.0)
    p.add_argument("--theta", type=float, default=0.8, help="required infeasibility reduction factor")
    p.add_argument("--kappa", type=float, default=0.5, help="penalty shrink factor")
    p.add_argument("--nu", type=float, default=1.0, help="merit averaging weight in (0, 1]")
    p.add_argument("--direction", choices=[d.value for d in Direction], default="bb")
    p.add_argument("--max-outer", type=int, default=100)
    p.add_argument("--max-inner", type=int, default=10_000)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", default=None, help="report path (default: bench_<formulation>.<format>)")
    p.add_argument("--trace", action="store_true", help="log progress and write per-run audit counters")
    p.add_argument("--workers", type=int, default=1, help="worker processes (default 1)")
    p.add_argument("--no-timing", action="store_true", help="record runtime 0 so reports are byte-reproducible")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.trace else logging.WARNING, format="%(message)s")
    if args.grid_n < 1:
        print("error: --grid-n must be positive", file=sys.stderr)
        return 2
    if not args.lo <= args.hi:
        print("error: --lo must not exceed --hi", file=sys.stderr)
        return 2
    try:
        outer = OuterSettings(
            mu0=args.mu0,
            theta_outer=args.theta,
            kappa=args.kappa,
            eps_prim=args.eps_prim,
            eps_dual=args.eps_dual,
            max_outer=args.max_outer,
        )
        inner = InnerSettings(nu=args.nu, direction=args.direction, max_iter=args.max_inner)
    except ParameterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    out = args.out or f"bench_{args.formulation}.{args.format}"
    parent = os.path.dirname(os.path.abspath(out))
    if not os.path.isdir(parent):
        print(f"error: output directory {parent} does not exist", file=sys.stderr)
        return 2

    log.info("running %d starts, formulation=%s, direction=%s", args.grid_n**2, args.formulation, args.direction)
    records = run_grid(
        args.formulation,
        args.grid_n,
        args.lo,
        args.hi,
        outer_settings=outer,
        inner_settings=inner,
        workers=args.workers,
        audit=args.trace,
        timing=not args.no_timing,
    )
    stats = aggregate(records, args.formulation)
    try:
        paths = emit_report(stats, records, args.format, out)
        if args.trace:
            audit_path = os.path.splitext(out)[0] + ".audit.jsonl"
            with open(audit_path, "w") as fh:
                for r in records:
                    row = {"index": r.index, "start": list(r.start_point), "status": r.status}
                    row.update(vars(r.audit) if r.audit else {})
                    fh.write(json.dumps(row) + "\n")
            paths.append(audit_path)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    print(
        f"{stats.formulation}: runs={stats.runs} terminal={stats.terminal} "
        f"global={stats.global_count} ({100 * stats.global_fraction:.2f}%) local={stats.local_count} "
        f"other={stats.other_count} outer median/max={stats.outer_median}/{stats.outer_max} "
        f"inner median/max={stats.inner_median}/{stats.inner_max} "
        f"runtime median={stats.runtime_median_ms:.2f} ms"
    )
    for path in paths:
        log.info("wrote %s", path)
    return 0 if stats.terminal == stats.runs else 1


if __name__ == "__main__":
    sys.exit(main())
