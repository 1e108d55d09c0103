#!/usr/bin/env python3
"""Compare the numba kernels with their pure-numpy fallbacks.

Usage::

    python3 benchmarks/bench_kernels.py [--size 100000] [--repeat 5] [--grid-n 21]

Part 1 times the batched vanishing-constraint projection and the block prox
on one large vector (where vectorized numpy is competitive).  Part 2 times a
grid study end to end in two subprocesses, one with
``IMPLICIT_AL_DISABLE_NUMBA=1``; there the prox is called on tiny vectors
thousands of times and per-call overhead dominates.
"""

import argparse
import os
import subprocess
import sys
import time

import numpy as np

from implicit_al import kernels
from implicit_al._jit import HAVE_NUMBA
from implicit_al.prox import IndicatorBox, IndicatorVC, IndicatorZero, SeparableG


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def kernel_part(size, repeat):
    rng = np.random.default_rng(0)
    u, w = rng.normal(scale=3, size=(2, size))
    kernels.project_vc_loop(u[:4], w[:4])  # compile outside the timing
    t_loop = best_of(lambda: kernels.project_vc_loop(u, w), repeat)
    t_np = best_of(lambda: kernels.project_vc_numpy(u, w), repeat)
    a1, b1 = kernels.project_vc_loop(u, w)
    a2, b2 = kernels.project_vc_numpy(u, w)
    same = np.array_equal(a1, a2) and np.array_equal(b1, b2)
    print(f"project_vc  n={size:>8}  loop {1e3 * t_loop:8.3f} ms  numpy {1e3 * t_np:8.3f} ms  identical={same}")

    k = size // 4
    atoms = [IndicatorVC()] * k + [IndicatorZero(k), IndicatorBox(-np.ones(k), np.ones(k))]
    g = SeparableG(atoms)
    v = rng.normal(scale=3, size=g.m)
    g.prox_loop(v[:], 1.0)
    t_loop = best_of(lambda: g.prox_loop(v, 1.0), repeat)
    t_np = best_of(lambda: g.prox_numpy(v, 1.0), repeat)
    same = np.array_equal(g.prox_loop(v, 1.0)[0], g.prox_numpy(v, 1.0)[0])
    print(f"block prox  m={g.m:>8}  loop {1e3 * t_loop:8.3f} ms  numpy {1e3 * t_np:8.3f} ms  identical={same}")

    small = SeparableG([IndicatorVC(), IndicatorVC()])
    v4 = rng.normal(size=4)
    small.prox_loop(v4, 1.0)
    n_calls = 20000
    t_loop = best_of(lambda: [small.prox_loop(v4, 1.0) for _ in range(n_calls)], repeat)
    t_np = best_of(lambda: [small.prox_numpy(v4, 1.0) for _ in range(n_calls)], repeat)
    print(f"block prox  m=       4  loop {1e6 * t_loop / n_calls:8.3f} us/call  numpy {1e6 * t_np / n_calls:8.3f} us/call")


def grid_part(grid_n):
    code = (
        "import time; from implicit_al.bench import run_grid, aggregate;"
        "run_grid('implicit', points=[(1.0, 1.0)]);"
        f"t=time.perf_counter(); r=run_grid('implicit', {grid_n}); dt=time.perf_counter()-t;"
        "s=aggregate(r); print(f'{dt:.2f} {s.global_count} {s.runs}')"
    )
    for label, flag in (("numba", "0"), ("numpy", "1")):
        env = dict(os.environ, IMPLICIT_AL_DISABLE_NUMBA=flag)
        out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
        dt, glob, runs = out.stdout.split()
        print(f"grid {grid_n}x{grid_n} implicit  {label:5s}  {float(dt):7.2f} s  global {glob}/{runs}")


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--size", type=int, default=100_000)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--grid-n", type=int, default=21)
    args = ap.parse_args(argv)
    if not HAVE_NUMBA:
        print("numba disabled in this process; loop timings below are interpreted Python")
    kernel_part(args.size, args.repeat)
    grid_part(args.grid_n)


if __name__ == "__main__":
    main()
