"""Hot prox kernels for separable indicator/zero terms.

Two interchangeable implementations are kept:

* ``prox_blocks_loop``: a per-block loop compiled with numba when available;
* ``prox_blocks_numpy``: vectorized numpy over precomputed index groups.

``prox_blocks`` points at the first when numba is active and at the second
otherwise (see :mod:`implicit_al._jit`). Both perform the same floating-point
operations in the same order, so they agree bit-for-bit.
"""

import numpy as np

from ._jit import HAVE_NUMBA, njit

KIND_ZERO = 0
KIND_IZERO = 1
KIND_BOX = 2
KIND_VC = 3


@njit(cache=True)
def _vc_pair(u, w):
    # quadrant candidate vs axis candidate (0, w); ties go to the quadrant
    qa = u if u > 0.0 else 0.0
    qb = w if w > 0.0 else 0.0
    dq = (qa - u) * (qa - u) + (qb - w) * (qb - w)
    da = u * u
    if dq <= da:
        return qa, qb
    return 0.0, w


@njit(cache=True)
def prox_blocks_loop(v, kinds, starts, dims, perm, lo, hi):
    # block b owns components perm[starts[b] : starts[b] + dims[b]]
    z = v.copy()
    for blk in range(kinds.shape[0]):
        kind = kinds[blk]
        s = starts[blk]
        if kind == KIND_IZERO:
            for t in range(s, s + dims[blk]):
                z[perm[t]] = 0.0
        elif kind == KIND_BOX:
            for t in range(s, s + dims[blk]):
                i = perm[t]
                val = v[i]
                if val < lo[i]:
                    val = lo[i]
                if val > hi[i]:
                    val = hi[i]
                z[i] = val
        elif kind == KIND_VC:
            ia = perm[s]
            ib = perm[s + 1]
            a, b = _vc_pair(v[ia], v[ib])
            z[ia] = a
            z[ib] = b
    return z


@njit(cache=True)
def project_vc_loop(u, w):
    a = np.empty_like(u)
    b = np.empty_like(w)
    for i in range(u.shape[0]):
        a[i], b[i] = _vc_pair(u[i], w[i])
    return a, b


def project_vc_numpy(u, w):
    u = np.asarray(u, dtype=float)
    w = np.asarray(w, dtype=float)
    qa = np.where(u > 0.0, u, 0.0)
    qb = np.where(w > 0.0, w, 0.0)
    dq = (qa - u) * (qa - u) + (qb - w) * (qb - w)
    take_quadrant = dq <= u * u
    return np.where(take_quadrant, qa, 0.0), np.where(take_quadrant, qb, w)


def prox_blocks_numpy(v, izero, box, vc_a, vc_b, lo, hi):
    z = v.copy()
    if izero.size:
        z[izero] = 0.0
    if box.size:
        t = v[box]
        t = np.where(t < lo[box], lo[box], t)
        z[box] = np.where(t > hi[box], hi[box], t)
    if vc_a.size:
        z[vc_a], z[vc_b] = project_vc_numpy(v[vc_a], v[vc_b])
    return z


project_vc_many = project_vc_loop if HAVE_NUMBA else project_vc_numpy
