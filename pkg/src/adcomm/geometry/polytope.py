"""Exact H/V representations, conversion and facet canonicalization."""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Sequence

import numpy as np

from .dd import LinealityError, extreme_rays
from .exact import (
    as_fraction,
    common_denominator,
    integer_row_span,
    fmt,
    nullspace,
    primitive,
    rref,
    to_primitive_integers,
    vec,
)


class GeometryError(ValueError):
    pass


class Unbounded(GeometryError):
    pass


class Infeasible(GeometryError):
    pass


class DimensionMismatch(GeometryError):
    pass


def _row(a, b) -> tuple[tuple[Fraction, ...], Fraction]:
    return vec(a), as_fraction(b)


@dataclass(frozen=True)
class HPolyhedron:
    """``{x : a.x <= b for (a, b) in inequalities, c.x = d for (c, d) in equalities}``."""

    dim: int
    inequalities: tuple = ()
    equalities: tuple = ()

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dim must be positive")
        ineq = tuple(_row(a, b) for a, b in self.inequalities)
        eq = tuple(_row(c, d) for c, d in self.equalities)
        for a, _ in ineq + eq:
            if len(a) != self.dim:
                raise DimensionMismatch(f"row of length {len(a)} in a {self.dim}-dimensional system")
        object.__setattr__(self, "inequalities", ineq)
        object.__setattr__(self, "equalities", eq)

    def contains(self, x) -> bool:
        x = vec(x)
        return all(_dot(a, x) <= b for a, b in self.inequalities) and all(
            _dot(c, x) == d for c, d in self.equalities
        )

    def scaled(self, factors_ineq: Sequence, factors_eq: Sequence = ()) -> "HPolyhedron":
        """Same set with every row multiplied by a positive (nonzero) rational."""
        fi = [as_fraction(f) for f in factors_ineq]
        fe = [as_fraction(f) for f in factors_eq] or [Fraction(1)] * len(self.equalities)
        return HPolyhedron(
            self.dim,
            tuple((tuple(v * f for v in a), b * f) for (a, b), f in zip(self.inequalities, fi)),
            tuple((tuple(v * f for v in c), d * f) for (c, d), f in zip(self.equalities, fe)),
        )


@dataclass(frozen=True)
class VPolytope:
    """Convex hull of a finite point set, kept sorted and duplicate free."""

    dim: int
    vertices: tuple = ()

    def __post_init__(self):
        pts = sorted({vec(v) for v in self.vertices})
        for v in pts:
            if len(v) != self.dim:
                raise DimensionMismatch(f"point of length {len(v)} in dimension {self.dim}")
        object.__setattr__(self, "vertices", tuple(pts))
        object.__setattr__(self, "_int", None)

    @classmethod
    def from_integer(cls, W, L: int = 1) -> "VPolytope":
        """Build from integer rows ``W`` meaning points ``W / L``."""
        W = np.asarray(W)
        if W.dtype != object:
            W = W.astype(np.int64)
        W = np.unique(W, axis=0) if W.dtype != object else np.array(sorted(set(map(tuple, W))), dtype=object)
        L = int(L)
        obj = cls.__new__(cls)
        object.__setattr__(obj, "dim", int(W.shape[1]))
        pts = tuple(tuple(Fraction(int(x), L) for x in row) for row in W)
        object.__setattr__(obj, "vertices", pts)
        object.__setattr__(obj, "_int", (W, L))
        return obj

    def __len__(self):
        return len(self.vertices)

    def integer_points(self):
        """Points scaled by their common denominator: ``(W, L)`` with ``W`` a numpy array."""
        if self._int is None:
            L = common_denominator(self.vertices)
            rows = [[int(f * L) for f in v] for v in self.vertices]
            big = max((abs(x) for r in rows for x in r), default=0)
            W = np.array(rows, dtype=np.int64 if big < 2 ** 40 else object).reshape(len(rows), self.dim)
            object.__setattr__(self, "_int", (W, L))
        return self._int

    def extreme(self) -> "VPolytope":
        """Drop points that are not extreme."""
        system = v_to_facets(self)
        k = system.affine_dim
        if k == 0:
            return self
        W, L = self.integer_points()
        F = np.array([f.coeffs for f in system.facets], dtype=object)
        b = np.array([f.bound * L for f in system.facets], dtype=object)
        tight = (W.astype(object) @ F.T) == b
        keep = [i for i in range(len(W)) if integer_row_span(F[tight[i]])[0] == k]
        return VPolytope.from_integer(W[keep], L)


def _dot(a, x) -> Fraction:
    s = Fraction(0)
    for u, v in zip(a, x):
        if u:
            s += u * v
    return s


@dataclass(frozen=True, order=True)
class CanonicalFacet:
    """Integer inequality ``coeffs . x <= bound`` (or an equality, by context)."""

    coeffs: tuple[int, ...]
    bound: int

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(int(c) for c in self.coeffs))
        object.__setattr__(self, "bound", int(self.bound))

    @property
    def dim(self) -> int:
        return len(self.coeffs)

    def value(self, x) -> Fraction:
        return _dot(self.coeffs, vec(x))

    def slack(self, x) -> Fraction:
        return self.bound - self.value(x)

    def as_row(self) -> tuple[int, ...]:
        return self.coeffs + (self.bound,)


class AffineHull:
    """Equalities ``c.x = d`` in reduced form with late-coordinate pivots.

    Pivot coordinates are solved for in terms of the free ones, so any valid
    inequality has a unique representative with zero pivot coefficients.
    """

    def __init__(self, dim: int, equalities: Sequence[tuple[Sequence, object]]):
        self.dim = dim
        rows = [vec(c) + (as_fraction(d),) for c, d in equalities]
        R, piv = rref(rows, dim + 1, col_order=range(dim - 1, -1, -1)) if rows else ([], [])
        for r, p in zip(R, piv):
            if p == dim:
                raise Infeasible("inconsistent equalities")
        self.rows = R
        self.pivots = piv
        self.free = [i for i in range(dim) if i not in set(piv)]

    @property
    def affine_dim(self) -> int:
        return len(self.free)

    def equalities(self) -> list[CanonicalFacet]:
        out = []
        for r in self.rows:
            ints = to_primitive_integers(r)
            lead = next(v for v in ints[:-1] if v)
            if lead < 0:
                ints = tuple(-v for v in ints)
            out.append(CanonicalFacet(ints[:-1], ints[-1]))
        return sorted(out)

    def reduce(self, coeffs: Sequence, bound) -> tuple[list[Fraction], Fraction]:
        c = list(vec(coeffs))
        b = as_fraction(bound)
        for r, p in zip(self.rows, self.pivots):
            f = c[p]
            if f:
                for j in range(self.dim):
                    if r[j]:
                        c[j] -= f * r[j]
                b -= f * r[self.dim]
        return c, b

    def canonical(self, coeffs: Sequence, bound) -> CanonicalFacet:
        c, b = self.reduce(coeffs, bound)
        ints = to_primitive_integers(c + [b])
        return CanonicalFacet(ints[:-1], ints[-1])


class FacetSystem(NamedTuple):
    equalities: list
    facets: list

    @property
    def affine_dim(self) -> int:
        if not self.facets and not self.equalities:
            return 0
        dim = (self.facets or self.equalities)[0].dim
        return dim - len(self.equalities)


def affine_hull(v: VPolytope) -> AffineHull:
    if not v.vertices:
        raise GeometryError("empty point set")
    W, L = v.integer_points()
    Wh = _homogenize(W, L)
    _, ns = integer_row_span(Wh)
    # (c, e) . (w, L) = 0 means c . x = -e
    return AffineHull(v.dim, [(n[:-1], -n[-1]) for n in ns])


def _homogenize(W, L):
    col = np.full((W.shape[0], 1), L, dtype=W.dtype)
    return np.hstack([W, col])


def v_to_facets(v: VPolytope) -> FacetSystem:
    """Facets and affine hull of ``conv(v)``, canonical and sorted."""
    hull = affine_hull(v)
    eqs = hull.equalities()
    k = hull.affine_dim
    if k == 0:
        return FacetSystem(eqs, [])
    W, L = v.integer_points()
    free = hull.free
    rows = [tuple(-int(w[j]) for j in free) + (L,) for w in W]
    rays = extreme_rays(rows, k + 1)
    facets = []
    for r in rays:
        full = [0] * v.dim
        for j, a in zip(free, r[:-1]):
            full[j] = a
        ints = primitive(full + [r[-1]])
        facets.append(CanonicalFacet(ints[:-1], ints[-1]))
    return FacetSystem(eqs, sorted(facets))


def h_to_v(h: HPolyhedron) -> VPolytope:
    """Vertices of a bounded polyhedron, sorted lexicographically."""
    n = h.dim
    x0, N = _parametrize(h)
    k = len(N)
    if k == 0:
        if all(_dot(a, x0) <= b for a, b in h.inequalities):
            return VPolytope(n, (x0,))
        raise Infeasible("the unique solution of the equalities violates an inequality")
    rows = []
    for a, b in h.inequalities:
        aN = [_dot(a, col) for col in N]
        rows.append(to_primitive_integers([-x for x in aN] + [b - _dot(a, x0)]))
    rows.append((0,) * k + (1,))
    try:
        rays = extreme_rays(rows, k + 1)
    except LinealityError:
        lin = nullspace([vec(r[:-1]) for r in rows[:-1]] or [(Fraction(0),) * k], k)
        extra = []
        for d in lin:
            direction = [sum(N[i][j] * d[i] for i in range(k)) for j in range(n)]
            extra.append((direction, _dot(direction, x0)))
        h2 = HPolyhedron(n, h.inequalities, h.equalities + tuple(extra))
        h_to_v(h2)  # raises Infeasible when empty
        raise Unbounded("the polyhedron contains a line")
    finite = [r for r in rays if r[-1] > 0]
    if not finite:
        raise Infeasible("empty polyhedron")
    if any(r[-1] == 0 for r in rays):
        raise Unbounded("the polyhedron has a recession direction")
    pts = []
    for r in finite:
        t = r[-1]
        u = [Fraction(r[i], t) for i in range(k)]
        pts.append(tuple(x0[j] + sum(N[i][j] * u[i] for i in range(k)) for j in range(n)))
    return VPolytope(n, tuple(pts))


def _parametrize(h: HPolyhedron):
    """Solutions of the equalities as ``x0 + sum_i u_i N[i]``."""
    n = h.dim
    if not h.equalities:
        zero = (Fraction(0),) * n
        basis = [tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n)]
        return zero, basis
    rows = [c + (d,) for c, d in h.equalities]
    R, piv = rref(rows, n + 1, col_order=range(n + 1))
    if n in piv:
        raise Infeasible("inconsistent equalities")
    x0 = [Fraction(0)] * n
    for r, p in zip(R, piv):
        x0[p] = r[n]
    N = nullspace([r[:n] for r in R], n)
    return tuple(x0), N


class FacetCheck(NamedTuple):
    valid: bool
    tight_count: int
    tight_rank: int
    is_facet: bool


def validate_facet(v: VPolytope, f: CanonicalFacet, affine_dim: int | None = None) -> FacetCheck:
    """Check validity and count saturating points of ``f`` on ``v``."""
    if f.dim != v.dim:
        raise DimensionMismatch(f"facet of length {f.dim} for points of dimension {v.dim}")
    W, L = v.integer_points()
    c = np.array(f.coeffs, dtype=object)
    vals = W.astype(object) @ c
    bound = f.bound * L
    valid = bool(np.all(vals <= bound))
    tight = vals == bound
    n_tight = int(tight.sum())
    tr = integer_row_span(_homogenize(W[tight], L))[0] if n_tight else 0
    if affine_dim is None:
        affine_dim = affine_hull(v).affine_dim
    return FacetCheck(valid, n_tight, tr, valid and tr == affine_dim and affine_dim > 0)


# ---------------------------------------------------------------- JSON

def _enc(row) -> list[str]:
    return [fmt(as_fraction(x)) for x in row]


def hpolyhedron_to_json(h: HPolyhedron) -> dict:
    return {
        "dim": h.dim,
        "inequalities": [_enc(a + (b,)) for a, b in h.inequalities],
        "equalities": [_enc(c + (d,)) for c, d in h.equalities],
    }


def hpolyhedron_from_json(obj: dict) -> HPolyhedron:
    dim = int(obj["dim"])

    def rows(key):
        out = []
        for r in obj.get(key, []):
            fr = [as_fraction(x) for x in r]
            if len(fr) != dim + 1:
                raise DimensionMismatch(f"{key} row has {len(fr)} entries, expected {dim + 1}")
            out.append((fr[:-1], fr[-1]))
        return tuple(out)

    return HPolyhedron(dim, rows("inequalities"), rows("equalities"))


def vpolytope_to_json(v: VPolytope) -> dict:
    return {"dim": v.dim, "vertices": [_enc(p) for p in v.vertices]}


def vpolytope_from_json(obj: dict) -> VPolytope:
    pts = [vec(p) for p in obj["vertices"]]
    dim = int(obj.get("dim", len(pts[0]) if pts else 0))
    return VPolytope(dim, tuple(pts))


def facets_to_json(system: FacetSystem) -> dict:
    dim = (system.facets or system.equalities)[0].dim if (system.facets or system.equalities) else 0
    return {
        "dim": dim,
        "inequalities": [_enc(f.as_row()) for f in system.facets],
        "equalities": [_enc(e.as_row()) for e in system.equalities],
    }


def dumps(obj: dict) -> str:
    return json.dumps(obj, indent=1)
