"""Double-description enumeration of extreme rays of a pointed integer cone.

The cone is ``{y : A y >= 0}``. Rows are inserted in lexicographic order
after an initial basis of rank-increasing rows. Adjacency of a positive and
a negative ray is decided combinatorially: their common zero set must have
at least ``d - 2`` members and no third ray may vanish on all of it.
Arithmetic is on integers throughout, rays are kept primitive.
"""
from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Sequence

import numpy as np

from .exact import IncrementalBasis, primitive

_SAFE = 2 ** 62


class LinealityError(ValueError):
    """The cone contains a line, so it has no extreme rays."""


def _int_array(rows):
    big = max((abs(v) for r in rows for v in r), default=0)
    if big < 2 ** 31:
        return np.array(rows, dtype=np.int64)
    return np.array(rows, dtype=object)


def _initial_rays(basis_rows: list[tuple[int, ...]]) -> list[tuple[int, ...]]:
    """Columns of the inverse basis matrix, made primitive and nonnegative."""
    d = len(basis_rows)
    aug = [[Fraction(v) for v in r] + [Fraction(int(i == j)) for j in range(d)]
           for i, r in enumerate(basis_rows)]
    for c in range(d):
        p = next(i for i in range(c, d) if aug[i][c] != 0)
        aug[c], aug[p] = aug[p], aug[c]
        inv = 1 / aug[c][c]
        aug[c] = [v * inv for v in aug[c]]
        for i in range(d):
            if i != c and aug[i][c] != 0:
                f = aug[i][c]
                aug[i] = [a - f * b for a, b in zip(aug[i], aug[c])]
    rays = []
    for j in range(d):
        col = [aug[i][d + j] for i in range(d)]
        den = 1
        for f in col:
            den = den * f.denominator // gcd(den, f.denominator)
        rays.append(primitive([int(f * den) for f in col]))
    return rays


def extreme_rays(rows: Sequence[Sequence[int]], dim: int) -> list[tuple[int, ...]]:
    """Extreme rays of ``{y in R^dim : a . y >= 0 for a in rows}``.

    Parameters
    ----------
    rows : sequence of integer vectors
    dim : ambient dimension

    Returns
    -------
    list of primitive integer tuples, sorted.

    Raises
    ------
    LinealityError
        if the rows do not have full column rank.
    """
    clean = sorted({primitive([int(v) for v in r]) for r in rows if any(r)})
    basis = IncrementalBasis(dim)
    init_idx = []
    for i, r in enumerate(clean):
        if basis.add(r):
            init_idx.append(i)
            if len(basis) == dim:
                break
    if len(basis) < dim:
        raise LinealityError(f"constraint rank {len(basis)} < dimension {dim}")
    init_set = set(init_idx)
    order = init_idx + [i for i in range(len(clean)) if i not in init_set]

    rays = _int_array(_initial_rays([clean[i] for i in init_idx]))
    # zero-set incidence: Z[r, k] is True when ray r vanishes on inserted row k
    Z = np.zeros((dim, len(order)), dtype=bool)
    for j in range(dim):
        for k in range(dim):
            Z[j, k] = k != j
    need = dim - 2

    for k in range(dim, len(order)):
        a = _int_array([clean[order[k]]])[0]
        if rays.dtype != object and (
            int(np.abs(rays).max()) * int(np.abs(a).max()) * dim * 4 >= _SAFE
        ):
            rays = rays.astype(object)
        if rays.dtype == object or a.dtype == object:
            vals = np.array([sum(int(x) * int(y) for x, y in zip(r, a)) for r in rays], dtype=object)
            sgn = np.array([(v > 0) - (v < 0) for v in vals], dtype=np.int8)
        else:
            vals = rays @ a
            sgn = np.sign(vals).astype(np.int8)
        pos = np.flatnonzero(sgn > 0)
        neg = np.flatnonzero(sgn < 0)
        zer = np.flatnonzero(sgn == 0)
        Z[zer, k] = True
        if neg.size == 0:
            continue
        new_rays, new_zero = [], []
        if pos.size:
            Zk = Z[:, :k]
            zf = Zk.astype(np.float32)
            counts = zf[pos] @ zf[neg].T
            pi, ni = np.nonzero(counts >= need - 0.5)
            if pi.size:
                n_rays = rays.shape[0]
                nbytes = (n_rays + 7) // 8
                packed = np.packbits(Zk, axis=0)  # (nbytes, k)
                cols: dict[int, int] = {}

                def col(j):
                    c = cols.get(j)
                    if c is None:
                        c = int.from_bytes(packed[:, j].tobytes(), "big")
                        cols[j] = c
                    return c

                top = 8 * nbytes - 1
                everyone = ((1 << n_rays) - 1) << (8 * nbytes - n_rays)
                for p, n in zip(pos[pi], neg[ni]):
                    common = np.flatnonzero(Zk[p] & Zk[n])
                    mask = everyone
                    for j in common:
                        mask &= col(int(j))
                    mask &= ~((1 << (top - int(p))) | (1 << (top - int(n))))
                    if mask:
                        continue
                    vp, vn = vals[p], vals[n]
                    r = primitive([int(x) for x in (vp * rays[n] - vn * rays[p])])
                    new_rays.append(r)
                    zr = np.zeros(len(order), dtype=bool)
                    zr[common] = True
                    zr[k] = True
                    new_zero.append(zr)
        keep = np.concatenate([pos, zer])
        keep.sort()
        if new_rays:
            nr = _int_array(new_rays)
            if rays.dtype == object or nr.dtype == object:
                rays = np.concatenate([rays[keep].astype(object), nr.astype(object)])
            else:
                rays = np.concatenate([rays[keep], nr])
            Z = np.concatenate([Z[keep], np.array(new_zero)])
        else:
            rays = rays[keep]
            Z = Z[keep]
    return sorted(tuple(int(v) for v in r) for r in rays)
