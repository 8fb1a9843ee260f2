"""Classical values of linear figures of merit under resource bounds."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy.optimize import linprog

from .exact_lp import LPInfeasible, solve_lp
from .scenario import ExtendedVertexSet, FigureOfMerit, ScenarioError, ScenarioSpec, extended_vertices


class InfeasibleResources(ScenarioError):
    pass


class Unachievable(ScenarioError):
    pass


def exact(x) -> Fraction:
    """Exact rational value of an int, Fraction, ``"p/q"`` string or float."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        return Fraction(x)
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    if isinstance(x, np.floating):
        return Fraction(float(x))
    return Fraction(str(x))


class ClassicalModel:
    """Extended vertices reduced to what a figure of merit needs.

    Vertices with identical (value, resources) pairs are merged, and a vertex
    is dropped when another one is at least as good with resources no larger.
    """

    def __init__(self, spec: ScenarioSpec, fom: FigureOfMerit, vertices: ExtendedVertexSet | None = None):
        self.spec = spec
        self.fom = fom
        ev = vertices if vertices is not None else extended_vertices(spec)
        L = ev.denominator
        nb = spec.n_behavior
        B = ev.points[:, :nb].astype(object)
        vals = [fom.constant + sum((c * int(b) for c, b in zip(fom.coeffs, row) if c), Fraction(0)) / L
                for row in B]
        res = [tuple(Fraction(int(v), L) for v in row) for row in ev.points[:, nb:]]
        first: dict = {}
        for k, key in enumerate(zip(vals, res)):
            first.setdefault(key, k)
        pairs = sorted(first, key=lambda t: (-t[0], t[1]))
        kept: list[tuple[Fraction, tuple]] = []
        for v, r in pairs:
            if any(kv >= v and all(a <= b for a, b in zip(kr, r)) for kv, kr in kept):
                continue
            kept.append((v, r))
        self.values = [v for v, _ in kept]
        self.resources = [r for _, r in kept]
        # index into the extended vertex set behind each kept pair
        self.origin = [first[p] for p in kept]

    def check(self, resources) -> list[Fraction]:
        res = [exact(r) for r in resources]
        if len(res) != self.spec.N:
            raise ScenarioError(f"expected {self.spec.N} resource values")
        for i, r in enumerate(res):
            lo, hi = self.spec.resource_bounds(i)
            if r < lo:
                raise InfeasibleResources(f"resource {i + 1} = {r} is below its lower bound {lo}")
        return res

    def value(self, resources) -> Fraction:
        """Exact optimum of the convex-weights LP at fixed resources."""
        res = self.check(resources)
        n = len(self.values)
        A_ub = [[r[i] for r in self.resources] for i in range(self.spec.N)]
        try:
            out = solve_lp(self.values, A_ub, res, [[1] * n], [1])
        except LPInfeasible as exc:
            raise InfeasibleResources(str(exc)) from exc
        return out.value

    def best_vertex(self, resources) -> tuple[Fraction, int]:
        res = self.check(resources)
        best = None
        for k, (v, r) in enumerate(zip(self.values, self.resources)):
            if all(a <= b for a, b in zip(r, res)) and (best is None or v > best[0]):
                best = (v, k)
        if best is None:
            raise InfeasibleResources("no vertex within the resource bounds")
        return best

    def min_last_resource(self, fixed: Sequence, target) -> Fraction | None:
        """Least value of the last resource reaching ``target`` with the others fixed."""
        N = self.spec.N
        n = len(self.values)
        A_ub = [[r[i] for r in self.resources] for i in range(N - 1)]
        b_ub = [exact(v) for v in fixed]
        A_ub.append([-v for v in self.values])
        b_ub.append(-exact(target))
        try:
            out = solve_lp([r[N - 1] for r in self.resources], A_ub, b_ub, [[1] * n], [1], maximize=False)
        except LPInfeasible:
            return None
        lo, _ = self.spec.resource_bounds(N - 1)
        return max(lo, out.value)


def classical_value(spec: ScenarioSpec, fom: FigureOfMerit, resources: Sequence,
                    vertices: ExtendedVertexSet | None = None) -> Fraction:
    """Best classical value with every sender's resource bounded."""
    return ClassicalModel(spec, fom, vertices).value(resources)


@dataclass(frozen=True)
class TotalResult:
    resources: tuple[float, ...]
    product: float


def classical_total(spec: ScenarioSpec, fom: FigureOfMerit, S, grid: int = 201,
                    vertices: ExtendedVertexSet | None = None, tol: float = 1e-10) -> TotalResult:
    """Smallest product of resources for which the classical value reaches ``S``.

    Two senders: grid over the first resource, golden-section refinement of
    the best bracket, and an exact inner LP for the least second resource.
    More senders: coordinate descent with the same one-dimensional search.
    """
    model = ClassicalModel(spec, fom, vertices)
    N = spec.N
    bounds = [spec.resource_bounds(i) for i in range(N)]
    ones = [b[1] for b in bounds]
    if model.value(ones) < exact(S):
        raise Unachievable(f"S = {S} exceeds the classical maximum {float(model.value(ones)):.6g}")
    if N == 1:
        m = model.min_last_resource([], S)
        return TotalResult((float(m),), float(m))

    def search(coord, others):
        """Minimize the product over resource ``coord``, the last one solved by LP."""

        def h(t):
            fixed = list(others)
            fixed[coord] = t
            last = model.min_last_resource(fixed, S)
            if last is None:
                return math.inf, None
            return float(math.prod(fixed) * last), tuple(fixed) + (last,)

        lo, hi = float(bounds[coord][0]), float(bounds[coord][1])
        ts = np.linspace(lo, hi, grid)
        vals = [h(Fraction(t))[0] for t in ts]
        k = int(np.argmin(vals))
        a, b = ts[max(k - 1, 0)], ts[min(k + 1, grid - 1)]
        g = (math.sqrt(5) - 1) / 2
        c, d = b - g * (b - a), a + g * (b - a)
        fc, fd = h(Fraction(c))[0], h(Fraction(d))[0]
        while b - a > tol:
            if fc <= fd:
                b, d, fd = d, c, fc
                c = b - g * (b - a)
                fc = h(Fraction(c))[0]
            else:
                a, c, fc = c, d, fd
                d = a + g * (b - a)
                fd = h(Fraction(d))[0]
        cands = [h(Fraction(t)) for t in (a, b, ts[k])]
        return min((c for c in cands if c[1] is not None), key=lambda c: c[0])

    others = [Fraction(1)] * (N - 1)
    best = None
    for _ in range(1 if N == 2 else 20):
        for coord in range(N - 1):
            val, res = search(coord, others)
            others = list(res[:-1])
        if best is not None and best[0] - val < 1e-12:
            best = (val, res)
            break
        best = (val, res)
    val, res = best
    return TotalResult(tuple(float(r) for r in res), float(val))


def operational_relaxation(spec: ScenarioSpec, fom: FigureOfMerit, resources: Sequence) -> float:
    """Upper bound on the operational value from an LP over behaviors.

    For each sender and each fixed value of the other inputs (and ``y``), the
    outcome ``z`` is a post-processing of that sender's message, so guessing
    (or excluding) the sender's input from ``z`` cannot beat its resource.
    Independence of the senders' encodings is dropped.
    """
    nb = spec.n_behavior
    res = [float(exact(r)) for r in resources]
    rows_ub, b_ub, rows_eq, b_eq = [], [], [], []
    n_aux = 0
    blocks = []
    for i, s in enumerate(spec.senders):
        other = [range(n) for k, n in enumerate(spec.n_x) if k != i]
        for rest in itertools.product(*other, range(spec.n_y)):
            xo, y = rest[:-1], rest[-1]
            blocks.append((i, xo, y, n_aux))
            n_aux += spec.n_z
    nv = nb + n_aux
    for i, xo, y, base in blocks:
        q = spec.senders[i].prior
        for z in range(spec.n_z):
            t = base + nb + z
            for x in range(spec.n_x[i]):
                xs = list(xo)
                xs.insert(i, x)
                row = np.zeros(nv)
                row[spec.index(z, xs, y)] = float(q[x])
                if spec.kind == "D":
                    row[t] = -1.0  # q p <= t
                else:
                    row = -row
                    row[t] = 1.0  # t <= q p
                rows_ub.append(row)
                b_ub.append(0.0)
        row = np.zeros(nv)
        row[base + nb: base + nb + spec.n_z] = 1.0
        if spec.kind == "D":
            rows_ub.append(row)
            b_ub.append(res[i])
        else:
            rows_ub.append(-row)
            b_ub.append(res[i] - 1.0)
    for xs in itertools.product(*(range(n) for n in spec.n_x)):
        for y in range(spec.n_y):
            row = np.zeros(nv)
            for z in range(spec.n_z):
                row[spec.index(z, xs, y)] = 1.0
            rows_eq.append(row)
            b_eq.append(1.0)
    c = np.zeros(nv)
    c[:nb] = -fom.array()
    bounds = [(0, 1)] * nb + [(None, None)] * n_aux
    out = linprog(c, A_ub=np.array(rows_ub), b_ub=b_ub, A_eq=np.array(rows_eq), b_eq=b_eq,
                  bounds=bounds, method="highs")
    if out.status != 0:
        raise InfeasibleResources(out.message)
    return float(-out.fun + float(fom.constant))
