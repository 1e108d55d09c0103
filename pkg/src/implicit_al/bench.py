"""Start-point grid study on the vanishing-constraints problem.

Every start ``(s1, s2)`` of a uniform grid is solved with the safeguarded AL
method under one formulation; the final point (projected to the original two
coordinates) is classified as the global minimizer, the local minimizer, or
neither.  Runs are independent and may execute in a process pool; records
always come back in grid order.
"""

import csv
import itertools
import json
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from typing import List, Optional, Sequence

import numpy as np

from .diagnostics import upsilon_certificate
from .inner import InnerSettings
from .mpvc import GLOBAL_MIN, LOCAL_MIN, Formulation, build_mpvc, start_point
from .outer import OuterSettings, solve

__all__ = [
    "RunRecord",
    "AggregateStats",
    "grid_points",
    "run_point",
    "run_grid",
    "aggregate",
    "emit_report",
    "load_json_report",
    "classify",
    "CSV_COLUMNS",
]

CLASS_RADIUS = 1e-6
CSV_COLUMNS = ["start_x1", "start_x2", "final_x1", "final_x2", "class", "outer", "inner", "runtime_ms", "status"]


@dataclass
class RunAudit:
    """Per-run invariant checks, filled only when auditing is requested."""

    inner_solves: int = 0
    certificate_failures: int = 0
    inner_steps: int = 0
    descent_violations: int = 0
    identity_max_err: float = 0.0


@dataclass
class RunRecord:
    index: int
    start_point: tuple
    final_x: tuple
    classified: str
    outer_iters: int
    inner_iters: int
    runtime: float
    status: str
    audit: Optional[RunAudit] = None


@dataclass
class AggregateStats:
    formulation: str
    runs: int
    terminal: int
    outer_median: int
    outer_max: int
    inner_median: int
    inner_max: int
    runtime_median_ms: float
    runtime_max_ms: float
    global_count: int
    local_count: int
    other_count: int
    global_fraction: float

    @classmethod
    def from_dict(cls, data):
        return cls(**{f.name: data[f.name] for f in fields(cls)})


def classify(x) -> str:
    x = np.asarray(x, dtype=float)[:2]
    if np.linalg.norm(x - GLOBAL_MIN) <= CLASS_RADIUS:
        return "global"
    if np.linalg.norm(x - LOCAL_MIN) <= CLASS_RADIUS:
        return "local"
    return "other"


def grid_points(count_per_axis=51, lo=-5.0, hi=20.0):
    axis = np.linspace(lo, hi, count_per_axis)
    return [(float(a), float(b)) for a, b in itertools.product(axis, axis)]


def _descent_ok(rec, nu):
    # merit sandwich and sublevel containment for one accepted step
    ok = rec.delta < 0.0 and rec.p <= rec.phi_prev + rec.delta and rec.p <= rec.phi0
    if nu == 1.0:
        return ok and rec.p <= rec.phi <= rec.phi_prev + rec.delta
    slack = 1e-12 * max(1.0, abs(rec.phi_prev))
    return ok and rec.p <= rec.phi + slack and rec.phi <= rec.phi_prev + nu * rec.delta + slack


def run_point(formulation, index, start, outer_settings, inner_settings, audit=False, timing=True, spec=None):
    """Solve one grid instance and return its :class:`RunRecord`."""
    formulation = Formulation(formulation)
    if spec is None:
        spec = build_mpvc(formulation)
    x0 = start_point(formulation, start)
    checks = RunAudit() if audit else None
    inner_cb = on_inner = None
    if audit:
        nu = inner_settings.nu

        def inner_cb(rec):
            checks.inner_steps += 1
            if not _descent_ok(rec, nu):
                checks.descent_violations += 1

        def on_inner(k, y_hat, mu, eps_k, res):
            checks.inner_solves += 1
            gnorm, is_cert = upsilon_certificate(spec, res.x_star, res.z_star, y_hat, mu)
            if not (res.converged and is_cert and gnorm <= eps_k):
                checks.certificate_failures += 1

    t0 = time.perf_counter()
    report = solve(spec, x0, None, outer_settings, inner_settings, inner_callback=inner_cb, on_inner=on_inner)
    elapsed = time.perf_counter() - t0 if timing else 0.0
    if audit:
        for tr in report.trace:
            checks.identity_max_err = max(checks.identity_max_err, abs(tr.dual - tr.inner_grad_norm))
    final = tuple(float(v) for v in report.x_star[:2])
    return RunRecord(
        index=index,
        start_point=tuple(start),
        final_x=final,
        classified=classify(final),
        outer_iters=report.outer_iters,
        inner_iters=report.total_inner_iters,
        runtime=elapsed,
        status=report.status.value,
        audit=checks,
    )


def _run_chunk(args):
    formulation, chunk, outer_settings, inner_settings, audit, timing = args
    spec = build_mpvc(formulation)
    out = []
    for index, start in chunk:
        try:
            out.append(run_point(formulation, index, start, outer_settings, inner_settings, audit, timing, spec))
        except Exception as exc:  # a failed run is recorded, never aborts the grid
            out.append(RunRecord(index, tuple(start), (np.nan, np.nan), "other", 0, 0, 0.0, f"error: {exc}"))
    return out


def run_grid(
    formulation="implicit",
    count_per_axis: int = 51,
    lo: float = -5.0,
    hi: float = 20.0,
    outer_settings: OuterSettings = OuterSettings(),
    inner_settings: InnerSettings = InnerSettings(),
    workers: int = 1,
    audit: bool = False,
    timing: bool = True,
    points: Optional[Sequence] = None,
) -> List[RunRecord]:
    """Solve from every grid start; ``points`` overrides the uniform grid."""
    formulation = Formulation(formulation).value
    if points is None:
        points = grid_points(count_per_axis, lo, hi)
    indexed = list(enumerate(points))
    workers = max(1, int(workers))
    if workers == 1:
        records = _run_chunk((formulation, indexed, outer_settings, inner_settings, audit, timing))
    else:
        size = max(1, -(-len(indexed) // (4 * workers)))
        chunks = [indexed[i : i + size] for i in range(0, len(indexed), size)]
        jobs = [(formulation, c, outer_settings, inner_settings, audit, timing) for c in chunks]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            records = [r for part in pool.map(_run_chunk, jobs) for r in part]
    records.sort(key=lambda r: r.index)
    return records


def _lower_median(values):
    ordered = sorted(values)
    return ordered[(len(ordered) - 1) // 2]


def aggregate(records: Sequence[RunRecord], formulation: str = "") -> AggregateStats:
    if not records:
        raise ValueError("aggregate needs at least one record")
    outer = [r.outer_iters for r in records]
    inner = [r.inner_iters for r in records]
    runtime = [1e3 * r.runtime for r in records]
    counts = {c: sum(r.classified == c for r in records) for c in ("global", "local", "other")}
    terminal = sum(r.status in ("solved", "infeasible_stationary") for r in records)
    return AggregateStats(
        formulation=str(formulation),
        runs=len(records),
        terminal=terminal,
        outer_median=int(_lower_median(outer)),
        outer_max=int(max(outer)),
        inner_median=int(_lower_median(inner)),
        inner_max=int(max(inner)),
        runtime_median_ms=float(_lower_median(runtime)),
        runtime_max_ms=float(max(runtime)),
        global_count=counts["global"],
        local_count=counts["local"],
        other_count=counts["other"],
        global_fraction=counts["global"] / len(records),
    )


def _csv_row(r: RunRecord):
    return [
        repr(r.start_point[0]),
        repr(r.start_point[1]),
        repr(r.final_x[0]),
        repr(r.final_x[1]),
        r.classified,
        r.outer_iters,
        r.inner_iters,
        repr(1e3 * r.runtime),
        r.status,
    ]


def _record_dict(r: RunRecord):
    d = asdict(r)
    d["start_point"] = list(r.start_point)
    d["final_x"] = list(r.final_x)
    return d


def scatter_path(path) -> str:
    root, _ = os.path.splitext(str(path))
    return root + ".scatter.csv"


def emit_report(stats: AggregateStats, records: Sequence[RunRecord], fmt: str, path) -> List[str]:
    """Write the report (``csv`` or ``json``) plus a start-point scatter file.

    Returns the list of written paths.
    """
    path = str(path)
    try:
        if fmt == "csv":
            with open(path, "w", newline="") as fh:
                writer = csv.writer(fh, lineterminator="\n")
                writer.writerow(CSV_COLUMNS)
                writer.writerows(_csv_row(r) for r in records)
        elif fmt == "json":
            with open(path, "w") as fh:
                json.dump({"stats": asdict(stats), "records": [_record_dict(r) for r in records]}, fh, indent=1)
                fh.write("\n")
        else:
            raise ValueError(f"unknown report format {fmt!r}")
        spath = scatter_path(path)
        with open(spath, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["start_x1", "start_x2", "class"])
            writer.writerows([repr(r.start_point[0]), repr(r.start_point[1]), r.classified] for r in records)
    except OSError as exc:
        raise OSError(f"cannot write report to {path}: {exc.strerror or exc}") from exc
    return [path, spath]


def load_json_report(path):
    with open(path) as fh:
        data = json.load(fh)
    stats = AggregateStats.from_dict(data["stats"])
    records = []
    for d in data["records"]:
        audit = RunAudit(**d["audit"]) if d.get("audit") else None
        records.append(
            RunRecord(
                index=d["index"],
                start_point=tuple(d["start_point"]),
                final_x=tuple(d["final_x"]),
                classified=d["classified"],
                outer_iters=d["outer_iters"],
                inner_iters=d["inner_iters"],
                runtime=d["runtime"],
                status=d["status"],
                audit=audit,
            )
        )
    return stats, records
