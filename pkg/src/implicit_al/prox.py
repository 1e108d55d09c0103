"""Proximal mappings of separable nonsmooth terms.

A :class:`SeparableG` is an ordered product of atoms, each acting on its own
block of the range space of ``c``.  Every atom shipped here is either the
zero function or the indicator of a closed set, so its prox is a (possibly
set-valued) projection and the prox-boundedness threshold is ``+inf``.

Set-valued projections are resolved deterministically: among equally close
points the one in the larger branch (the nonnegative quadrant for the
vanishing-constraint set) is returned.

Any object exposing ``prox(v, gamma) -> (z, g_at_z)``, ``value(z)``, ``m`` and
``prox_bound_gamma`` can stand in for a :class:`SeparableG`.
"""

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import kernels
from ._jit import HAVE_NUMBA
from .errors import ParameterError, ProxBoundednessError

__all__ = [
    "ZeroFunction",
    "IndicatorZero",
    "IndicatorBox",
    "IndicatorVC",
    "SeparableG",
    "StackedG",
    "stack_g",
    "prox_g",
    "project_vc",
    "moreau_env",
    "slack_oracle",
    "check_gamma",
]


@dataclass(frozen=True)
class ZeroFunction:
    block_dim: int = 1
    kind = kernels.KIND_ZERO

    def value(self, z):
        return 0.0


@dataclass(frozen=True)
class IndicatorZero:
    """Indicator of the origin of R^block_dim."""

    block_dim: int = 1
    kind = kernels.KIND_IZERO

    def value(self, z):
        return 0.0 if np.all(z == 0.0) else np.inf


@dataclass(frozen=True, eq=False)
class IndicatorBox:
    lo: np.ndarray
    hi: np.ndarray
    kind = kernels.KIND_BOX

    def __init__(self, lo, hi):
        lo = np.atleast_1d(np.asarray(lo, dtype=float))
        hi = np.atleast_1d(np.asarray(hi, dtype=float))
        lo, hi = np.broadcast_arrays(lo, hi)
        if np.any(lo > hi):
            raise ParameterError("IndicatorBox requires lo <= hi componentwise")
        object.__setattr__(self, "lo", lo.copy())
        object.__setattr__(self, "hi", hi.copy())

    @property
    def block_dim(self):
        return self.lo.size

    def value(self, z):
        return 0.0 if np.all((z >= self.lo) & (z <= self.hi)) else np.inf


@dataclass(frozen=True)
class IndicatorVC:
    """Indicator of the vanishing-constraint set {(a, b) : a >= 0, a*b >= 0}."""

    kind = kernels.KIND_VC

    @property
    def block_dim(self):
        return 2

    def value(self, z):
        a, b = z[0], z[1]
        return 0.0 if (a >= 0.0 and a * b >= 0.0) else np.inf


class SeparableG:
    """Block-separable sum of atoms.

    By default the atoms act on consecutive blocks of ``0..m-1`` in order;
    ``blocks`` may instead give each atom an explicit index sequence (the
    blocks must partition ``0..m-1``).
    """

    prox_bound_gamma = np.inf

    def __init__(self, atoms: Sequence, blocks: Optional[Sequence[Sequence[int]]] = None):
        atoms = tuple(atoms)
        if not atoms:
            raise ParameterError("SeparableG needs at least one atom")
        for atom in atoms:
            if atom.block_dim < 1:
                raise ParameterError(f"atom {atom!r} has non-positive block_dim")
        if blocks is None:
            blocks, start = [], 0
            for atom in atoms:
                blocks.append(tuple(range(start, start + atom.block_dim)))
                start += atom.block_dim
        blocks = tuple(tuple(int(i) for i in b) for b in blocks)
        if len(blocks) != len(atoms):
            raise ParameterError("one index block per atom is required")
        for atom, b in zip(atoms, blocks):
            if len(b) != atom.block_dim:
                raise ParameterError(f"block {b} does not match block_dim of {atom!r}")
        perm = np.array([i for b in blocks for i in b], dtype=np.int64)
        m = perm.size
        if not np.array_equal(np.sort(perm), np.arange(m)):
            raise ParameterError("index blocks must partition 0..m-1")
        self.atoms = atoms
        self.blocks = blocks
        self.m = m

        kinds = np.array([a.kind for a in atoms], dtype=np.int64)
        dims = np.array([len(b) for b in blocks], dtype=np.int64)
        starts = np.concatenate([[0], np.cumsum(dims)[:-1]]).astype(np.int64)
        lo = np.full(m, -np.inf)
        hi = np.full(m, np.inf)
        izero, box, vc_a, vc_b = [], [], [], []
        for atom, b in zip(atoms, blocks):
            if atom.kind == kernels.KIND_IZERO:
                izero.extend(b)
            elif atom.kind == kernels.KIND_BOX:
                box.extend(b)
                lo[list(b)] = atom.lo
                hi[list(b)] = atom.hi
            elif atom.kind == kernels.KIND_VC:
                vc_a.append(b[0])
                vc_b.append(b[1])
        as_idx = lambda idx: np.array(idx, dtype=np.int64)  # noqa: E731
        self._loop_args = (kinds, starts, dims, perm, lo, hi)
        self._numpy_args = (as_idx(izero), as_idx(box), as_idx(vc_a), as_idx(vc_b), lo, hi)

    def __repr__(self):
        return f"SeparableG(atoms={self.atoms!r}, blocks={self.blocks!r})"

    def __reduce__(self):
        return (SeparableG, (self.atoms, self.blocks))

    def prox(self, v, gamma):
        # all shipped atoms are indicators or zero: the prox ignores gamma
        if HAVE_NUMBA:
            z = kernels.prox_blocks_loop(v, *self._loop_args)
        else:
            z = kernels.prox_blocks_numpy(v, *self._numpy_args)
        return z, 0.0

    def prox_numpy(self, v, gamma):
        return kernels.prox_blocks_numpy(np.asarray(v, dtype=float), *self._numpy_args), 0.0

    def prox_loop(self, v, gamma):
        return kernels.prox_blocks_loop(np.asarray(v, dtype=float), *self._loop_args), 0.0

    def value(self, z):
        total = 0.0
        for atom, b in zip(self.atoms, self.blocks):
            total += atom.value(z[list(b)])
            if total == np.inf:
                break
        return total


class StackedG:
    """Product of two prox oracles acting on consecutive blocks."""

    def __init__(self, first, second):
        self.first = first
        self.second = second
        self.m = first.m + second.m
        self.prox_bound_gamma = min(first.prox_bound_gamma, second.prox_bound_gamma)

    def prox(self, v, gamma):
        k = self.first.m
        z1, g1 = self.first.prox(v[:k], gamma)
        z2, g2 = self.second.prox(v[k:], gamma)
        return np.concatenate([z1, z2]), g1 + g2

    def value(self, z):
        k = self.first.m
        return self.first.value(z[:k]) + self.second.value(z[k:])


def stack_g(first, second):
    """Product ``g1(z1) + g2(z2)``, kept flat when both factors are separable."""
    if isinstance(first, SeparableG) and isinstance(second, SeparableG):
        shifted = tuple(tuple(i + first.m for i in b) for b in second.blocks)
        return SeparableG(first.atoms + second.atoms, first.blocks + shifted)
    return StackedG(first, second)


def check_gamma(g, gamma):
    if not gamma > 0.0:
        raise ParameterError(f"prox stepsize must be positive, got {gamma!r}")
    if gamma >= g.prox_bound_gamma:
        raise ProxBoundednessError(
            f"prox stepsize {gamma!r} not below prox-boundedness threshold {g.prox_bound_gamma!r}"
        )


def prox_g(g, v, gamma):
    """Deterministic element of ``argmin_z g(z) + |z - v|^2 / (2 gamma)``.

    Returns
    -------
    z : ndarray
        Prox point, always in ``dom g``.
    g_at_z : float
        Value of ``g`` at ``z`` (finite).
    """
    check_gamma(g, gamma)
    return g.prox(np.asarray(v, dtype=float), gamma)


def project_vc(u, w):
    """Nearest point of {(a, b) : a >= 0, a*b >= 0} to ``(u, w)``."""
    return kernels._vc_pair(float(u), float(w))


def moreau_env(g, v, gamma):
    v = np.asarray(v, dtype=float)
    z, gz = prox_g(g, v, gamma)
    r = z - v
    return gz + r.dot(r) / (2.0 * gamma)


def slack_oracle(spec, x, y_hat, mu):
    """Prox of ``mu * g`` at ``c(x) + mu * y_hat``; returns ``(z, g(z))``."""
    return prox_g(spec.g, spec.c_value(x) + mu * np.asarray(y_hat, dtype=float), mu)
