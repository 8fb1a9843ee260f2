"""Exact rational helpers: parsing, integer scaling, elimination."""
from __future__ import annotations

from fractions import Fraction
from functools import reduce
from math import gcd, lcm
from typing import Iterable, Sequence

Rational = Fraction


def as_fraction(x) -> Fraction:
    """Coerce ints, Fractions and ``"p/q"`` strings; floats are rejected."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    if hasattr(x, "numerator") and hasattr(x, "denominator"):
        return Fraction(int(x.numerator), int(x.denominator))
    if hasattr(x, "item"):
        return as_fraction(x.item())
    raise TypeError(f"cannot convert {x!r} exactly; pass an int, Fraction or 'p/q' string")


def fmt(q: Fraction) -> str:
    q = as_fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def vec(xs: Iterable) -> tuple[Fraction, ...]:
    return tuple(as_fraction(x) for x in xs)


def primitive(ints: Sequence[int]) -> tuple[int, ...]:
    g = reduce(gcd, (abs(int(v)) for v in ints), 0)
    if g <= 1:
        return tuple(int(v) for v in ints)
    return tuple(int(v) // g for v in ints)


def to_primitive_integers(xs: Sequence) -> tuple[int, ...]:
    """Positive rescaling of a rational vector to coprime integers."""
    fr = [as_fraction(x) for x in xs]
    L = reduce(lcm, (f.denominator for f in fr), 1)
    return primitive([f.numerator * (L // f.denominator) for f in fr])


def common_denominator(rows: Iterable[Sequence[Fraction]]) -> int:
    L = 1
    for r in rows:
        for f in r:
            L = lcm(L, f.denominator)
    return L


def rref(rows: Sequence[Sequence[Fraction]], ncols: int, col_order: Sequence[int] | None = None):
    """Reduced row echelon form; pivots are searched in ``col_order``.

    Returns ``(R, pivots)`` where ``R`` are the nonzero rows and ``pivots[k]``
    is the pivot column of ``R[k]``.
    """
    order = list(range(ncols)) if col_order is None else list(col_order)
    M = [list(map(as_fraction, r)) for r in rows]
    pivots = []
    r = 0
    for c in order:
        piv = next((i for i in range(r, len(M)) if M[i][c] != 0), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        inv = 1 / M[r][c]
        M[r] = [v * inv for v in M[r]]
        for i in range(len(M)):
            if i != r and M[i][c] != 0:
                f = M[i][c]
                Mr = M[r]
                M[i] = [a - f * b for a, b in zip(M[i], Mr)]
        pivots.append(c)
        r += 1
        if r == len(M):
            break
    return [tuple(row) for row in M[:r]], pivots


def rank(rows: Sequence[Sequence[Fraction]], ncols: int) -> int:
    return len(rref(rows, ncols)[1])


def nullspace(rows: Sequence[Sequence[Fraction]], ncols: int) -> list[tuple[Fraction, ...]]:
    R, piv = rref(rows, ncols)
    free = [c for c in range(ncols) if c not in piv]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for row, p in zip(R, piv):
            v[p] = -row[f]
        basis.append(tuple(v))
    return basis


class IncrementalBasis:
    """Echelon basis grown one vector at a time (exact)."""

    def __init__(self, ncols: int):
        self.ncols = ncols
        self.rows: list[list[Fraction]] = []
        self.pivots: list[int] = []

    def reduce(self, v) -> list[Fraction]:
        w = [as_fraction(x) for x in v]
        for row, p in zip(self.rows, self.pivots):
            if w[p] != 0:
                f = w[p]
                w = [a - f * b for a, b in zip(w, row)]
        return w

    def add(self, v) -> bool:
        w = self.reduce(v)
        p = next((i for i, x in enumerate(w) if x != 0), None)
        if p is None:
            return False
        inv = 1 / w[p]
        w = [x * inv for x in w]
        for k, row in enumerate(self.rows):
            if row[p] != 0:
                f = row[p]
                self.rows[k] = [a - f * b for a, b in zip(row, w)]
        self.rows.append(w)
        self.pivots.append(p)
        return True

    def __len__(self):
        return len(self.rows)


def _int_nullspace_matrix(ns, ncols):
    """Nullspace vectors scaled to integers, as an object or int64 array."""
    import numpy as np

    if not ns:
        return np.zeros((ncols, 0), dtype=np.int64)
    cols = [to_primitive_integers(v) for v in ns]
    big = max(abs(x) for c in cols for x in c)
    dt = np.int64 if big < 2 ** 20 else object
    return np.array(cols, dtype=dt).T


def integer_row_span(W) -> tuple[int, list[tuple[Fraction, ...]]]:
    """Exact rank and nullspace of an integer matrix with many rows.

    Candidate independent rows come from a pivoted float QR; the result is
    then verified exactly (every row is annihilated by the exact nullspace of
    the candidates), falling back to exact elimination over all rows.
    """
    import numpy as np
    from scipy.linalg import qr

    W = np.asarray(W)
    n, m = W.shape
    if n == 0:
        return 0, [tuple(Fraction(int(i == j)) for j in range(m)) for i in range(m)]
    cand = []
    small = W.dtype != object and (np.abs(W).max() < 2 ** 50)
    if small:
        Wf = W.astype(float)
        _, Rq, piv = qr(Wf.T, pivoting=True, mode="economic")
        d = np.abs(np.diag(Rq))
        tol = max(Wf.shape) * np.finfo(float).eps * (d[0] if d.size else 0.0)
        r = int((d > tol).sum())
        cand = list(piv[: r + 2])
    basis = IncrementalBasis(m)
    for i in cand:
        basis.add([int(v) for v in W[i]])
    ns = nullspace([tuple(row) for row in basis.rows], m) if len(basis) else None
    if ns is not None:
        Nm = _int_nullspace_matrix(ns, m)
        prod = (W.astype(object) @ Nm.astype(object)) if (W.dtype == object or Nm.dtype == object) else W @ Nm
        if Nm.shape[1] == 0 or not np.any(prod != 0):
            return len(basis), ns
    basis = IncrementalBasis(m)
    for row in W:
        basis.add([int(v) for v in row])
        if len(basis) == m:
            break
    return len(basis), nullspace([tuple(row) for row in basis.rows], m)
