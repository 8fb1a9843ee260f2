"""Exact rational linear programming (dense two-phase simplex, Bland's rule).

Intended for problems with few constraints and up to a few thousand
columns, such as optimizing over convex weights of a vertex list.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .geometry.exact import as_fraction


class LPError(ValueError):
    pass


class LPInfeasible(LPError):
    pass


class LPUnbounded(LPError):
    pass


@dataclass(frozen=True)
class LPResult:
    value: Fraction
    x: tuple[Fraction, ...]
    basis: tuple[int, ...]


def _q(v) -> Fraction:
    if isinstance(v, float):
        return Fraction(v)
    return as_fraction(v)


def solve_lp(
    c: Sequence,
    A_ub: Sequence[Sequence] = (),
    b_ub: Sequence = (),
    A_eq: Sequence[Sequence] = (),
    b_eq: Sequence = (),
    maximize: bool = True,
) -> LPResult:
    """Optimize ``c.x`` subject to ``A_ub x <= b_ub``, ``A_eq x = b_eq``, ``x >= 0``.

    Floats are converted to their exact binary rational value.

    Raises
    ------
    LPInfeasible, LPUnbounded
    """
    n = len(c)
    rows: list[list[Fraction]] = []
    rhs: list[Fraction] = []
    n_slack = len(A_ub)
    width = n + n_slack
    for k, (a, b) in enumerate(zip(A_ub, b_ub)):
        r = [_q(v) for v in a] + [Fraction(0)] * n_slack
        r[n + k] = Fraction(1)
        rows.append(r)
        rhs.append(_q(b))
    for a, b in zip(A_eq, b_eq):
        rows.append([_q(v) for v in a] + [Fraction(0)] * n_slack)
        rhs.append(_q(b))
    m = len(rows)
    for i in range(m):
        if rhs[i] < 0:
            rows[i] = [-v for v in rows[i]]
            rhs[i] = -rhs[i]
    # artificial columns only where no slack can start the basis
    basis = [-1] * m
    for k in range(n_slack):
        if rows[k][n + k] == 1:
            basis[k] = n + k
    art = [i for i in range(m) if basis[i] < 0]
    total = width + len(art)
    T = [r + [Fraction(0)] * len(art) + [b] for r, b in zip(rows, rhs)]
    for j, i in enumerate(art):
        T[i][width + j] = Fraction(1)
        basis[i] = width + j

    def pivot(r, col):
        pv = T[r][col]
        if pv != 1:
            T[r] = [v / pv for v in T[r]]
        Tr = T[r]
        for i in range(m):
            if i != r:
                f = T[i][col]
                if f:
                    Ti = T[i]
                    T[i] = [a - f * b for a, b in zip(Ti, Tr)]
        basis[r] = col

    def run(cost, allowed):
        # maximize cost . x over the current tableau
        while True:
            cb = [cost[b] for b in basis]
            in_basis = set(basis)
            enter = -1
            for j in range(total):
                if not allowed[j] or j in in_basis:
                    continue
                d = cost[j]
                for i in range(m):
                    if cb[i] and T[i][j]:
                        d -= cb[i] * T[i][j]
                if d > 0:
                    enter = j
                    break
            if enter < 0:
                return
            best = None
            for i in range(m):
                a = T[i][enter]
                if a > 0:
                    ratio = T[i][-1] / a
                    if best is None or ratio < best[0] or (ratio == best[0] and basis[i] < basis[best[1]]):
                        best = (ratio, i)
            if best is None:
                raise LPUnbounded("objective is unbounded")
            pivot(best[1], enter)

    if art:
        cost1 = [Fraction(0)] * width + [Fraction(-1)] * len(art)
        run(cost1, [True] * total)
        if sum((T[i][-1] for i in range(m) if basis[i] >= width), Fraction(0)) != 0:
            raise LPInfeasible("constraints are infeasible")
        # drive remaining artificials out of the basis
        for i in range(m):
            if basis[i] >= width:
                col = next((j for j in range(width) if T[i][j] != 0), None)
                if col is not None:
                    pivot(i, col)
    sgn = 1 if maximize else -1
    cost = [sgn * _q(v) for v in c] + [Fraction(0)] * (total - n)
    allowed = [j < width for j in range(total)]
    run(cost, allowed)
    x = [Fraction(0)] * width
    for i, b in enumerate(basis):
        if b < width:
            x[b] = T[i][-1]
    value = sum((_q(ci) * xi for ci, xi in zip(c, x[:n]) if xi), Fraction(0))
    return LPResult(value, tuple(x[:n]), tuple(basis))
