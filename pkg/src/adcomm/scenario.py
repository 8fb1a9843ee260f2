"""Communication scenarios and their classical polytopes.

Coordinates of the extended polytope are the behavior entries ``p(z|x, y)``
in lexicographic order of ``(z, x_1, ..., x_N, y)`` followed by one resource
coordinate per sender (``D_i`` or ``A_i``). Labels are 1-based, as in
``"2|1,3"`` for ``p(2|x1=1, x2=3)``; the ``y`` label is appended only when
``n_y > 1``.
"""
from __future__ import annotations

import itertools
import json
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache, reduce
from pathlib import Path
from typing import Iterator, Sequence

import numpy as np

from .geometry import (
    CanonicalFacet,
    CoordinatePermutation,
    HPolyhedron,
    VPolytope,
    affine_hull,
    h_to_v,
    orbit_classify,
    v_to_facets,
)
from .geometry.exact import as_fraction, fmt, to_primitive_integers

DEFAULT_SELECTOR_CAP = 10 ** 6
DEFAULT_DECODER_CAP = 10 ** 6
DEFAULT_VERTEX_CAP = 5 * 10 ** 6


class ScenarioError(ValueError):
    pass


class SizeOverflow(ScenarioError):
    pass


class ParseError(ScenarioError):
    pass


@dataclass(frozen=True)
class Sender:
    n_x: int
    prior: tuple[Fraction, ...]
    n_m: int

    def __post_init__(self):
        if self.n_x < 1 or self.n_m < 1:
            raise ScenarioError("alphabet sizes must be positive")
        prior = tuple(as_fraction(q) for q in self.prior)
        if len(prior) != self.n_x:
            raise ScenarioError(f"prior of length {len(prior)} for n_x = {self.n_x}")
        if any(q < 0 for q in prior) or sum(prior) != 1:
            raise ScenarioError("priors must be nonnegative and sum to 1")
        object.__setattr__(self, "prior", prior)

    @classmethod
    def uniform(cls, n_x: int, n_m: int | None = None) -> "Sender":
        return cls(n_x, (Fraction(1, n_x),) * n_x, n_m if n_m is not None else 2 ** (n_x - 1))

    @property
    def uniform_prior(self) -> bool:
        return len(set(self.prior)) == 1


@dataclass(frozen=True)
class ScenarioSpec:
    senders: tuple[Sender, ...]
    n_y: int = 1
    n_z: int = 2
    kind: str = "D"

    def __post_init__(self):
        object.__setattr__(self, "senders", tuple(self.senders))
        if self.kind not in ("D", "A"):
            raise ScenarioError(f"kind must be 'D' or 'A', got {self.kind!r}")
        if not self.senders or self.n_y < 1 or self.n_z < 1:
            raise ScenarioError("sizes must be positive")

    @classmethod
    def uniform(cls, n_x: Sequence[int], n_z: int, kind: str = "D", n_y: int = 1,
                n_m: Sequence[int] | None = None) -> "ScenarioSpec":
        n_m = n_m or [None] * len(n_x)
        return cls(tuple(Sender.uniform(a, b) for a, b in zip(n_x, n_m)), n_y, n_z, kind)

    # -- sizes
    @property
    def N(self) -> int:
        return len(self.senders)

    @property
    def n_x(self) -> tuple[int, ...]:
        return tuple(s.n_x for s in self.senders)

    @property
    def n_m(self) -> tuple[int, ...]:
        return tuple(s.n_m for s in self.senders)

    @property
    def priors(self) -> tuple[tuple[Fraction, ...], ...]:
        return tuple(s.prior for s in self.senders)

    @property
    def n_inputs(self) -> int:
        return math.prod(self.n_x)

    @property
    def n_behavior(self) -> int:
        return self.n_z * self.n_inputs * self.n_y

    @property
    def dim(self) -> int:
        return self.n_behavior + self.N

    @property
    def name(self) -> str:
        return "(" + ",".join(map(str, self.n_x + (self.n_z,))) + ")"

    # -- indexing
    def index(self, z: int, xs: Sequence[int], y: int = 0) -> int:
        """0-based position of ``p(z|xs, y)`` (all labels 0-based)."""
        k = z
        for x, n in zip(xs, self.n_x):
            k = k * n + x
        return k * self.n_y + y

    def resource_index(self, i: int) -> int:
        return self.n_behavior + i

    def iter_behavior(self) -> Iterator[tuple[int, tuple[int, ...], int]]:
        for z in range(self.n_z):
            for xs in itertools.product(*(range(n) for n in self.n_x)):
                for y in range(self.n_y):
                    yield z, xs, y

    def label(self, z: int, xs: Sequence[int], y: int = 0) -> str:
        s = f"{z + 1}|" + ",".join(str(x + 1) for x in xs)
        if self.n_y > 1:
            s += f",{y + 1}"
        return s

    @cached_property
    def labels(self) -> list[str]:
        out = [self.label(z, xs, y) for z, xs, y in self.iter_behavior()]
        return out + [f"{self.kind}{i + 1}" for i in range(self.N)]

    def resource_bounds(self, i: int) -> tuple[Fraction, Fraction]:
        q = self.senders[i].prior
        return (max(q), Fraction(1)) if self.kind == "D" else (1 - min(q), Fraction(1))

    # -- JSON
    def to_json(self) -> dict:
        return {
            "senders": [{"n_x": s.n_x, "prior": [fmt(q) for q in s.prior], "n_m": s.n_m} for s in self.senders],
            "n_y": self.n_y,
            "n_z": self.n_z,
            "kind": self.kind,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "ScenarioSpec":
        try:
            senders = []
            for s in obj["senders"]:
                n_x = int(s["n_x"])
                prior = s.get("prior") or [Fraction(1, n_x)] * n_x
                n_m = int(s.get("n_m") or 2 ** (n_x - 1))
                senders.append(Sender(n_x, tuple(as_fraction(q) for q in prior), n_m))
            return cls(tuple(senders), int(obj.get("n_y", 1)), int(obj["n_z"]), str(obj.get("kind", "D")))
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"invalid scenario: {exc}") from exc

    @classmethod
    def load(cls, path) -> "ScenarioSpec":
        try:
            return cls.from_json(json.loads(Path(path).read_text()))
        except json.JSONDecodeError as exc:
            raise ParseError(f"{path}: {exc}") from exc


# ------------------------------------------------------------------ encodings

def encoding_index(n_m: int, x: int, m: int) -> int:
    return x * n_m + m


def build_encoding_polytope(spec: ScenarioSpec, sender: int, cap: int = DEFAULT_SELECTOR_CAP) -> HPolyhedron:
    """H-description of the joint (encoding, resource) polytope of one sender.

    Variables are ``p_e(m|x)`` at ``x * n_m + m`` then the resource value.
    The sum of per-message maxima (or minima) is linearized over all
    selectors ``s: m -> x``.
    """
    if not 0 <= sender < spec.N:
        raise ScenarioError(f"sender {sender} out of range")
    s = spec.senders[sender]
    n_x, n_m, q = s.n_x, s.n_m, s.prior
    if n_x ** n_m > cap:
        raise SizeOverflow(f"{n_x}^{n_m} selectors exceed the cap {cap}")
    dim = n_x * n_m + 1
    r = dim - 1

    def unit(j, c=1):
        v = [0] * dim
        v[j] = c
        return v

    ineq = [(unit(j, -1), 0) for j in range(r)]
    lo, hi = spec.resource_bounds(sender)
    ineq.append((unit(r, -1), -lo))
    ineq.append((unit(r, 1), hi))
    for sel in itertools.product(range(n_x), repeat=n_m):
        a = [Fraction(0)] * dim
        for m, x in enumerate(sel):
            a[encoding_index(n_m, x, m)] += q[x]
        if spec.kind == "D":
            a[r] = Fraction(-1)
            ineq.append((a, 0))
        else:
            ineq.append(([-v for v in a[:r]] + [Fraction(-1)], -1))
    eq = []
    for x in range(n_x):
        c = [0] * dim
        for m in range(n_m):
            c[encoding_index(n_m, x, m)] = 1
        eq.append((c, 1))
    return HPolyhedron(dim, tuple(ineq), tuple(eq))


def resource_of_encoding(spec: ScenarioSpec, sender: int, enc) -> Fraction:
    """Tight resource value of an encoding matrix ``enc[x][m]``."""
    s = spec.senders[sender]
    q = s.prior
    cols = [[q[x] * as_fraction(enc[x][m]) for x in range(s.n_x)] for m in range(s.n_m)]
    if spec.kind == "D":
        return sum((max(c) for c in cols), Fraction(0))
    return 1 - sum((min(c) for c in cols), Fraction(0))


def encoding_vertices(spec: ScenarioSpec, sender: int, cap: int = DEFAULT_SELECTOR_CAP) -> VPolytope:
    return h_to_v(build_encoding_polytope(spec, sender, cap))


def n_decoders(spec: ScenarioSpec) -> int:
    return spec.n_z ** (spec.n_y * math.prod(spec.n_m))


def enumerate_decoders(spec: ScenarioSpec, cap: int = DEFAULT_DECODER_CAP) -> np.ndarray:
    """All deterministic decoders as rows ``g[(m_1..m_N, y)] = z``, lexicographic."""
    count = n_decoders(spec)
    if count > cap:
        raise SizeOverflow(f"{count} decoders exceed the cap {cap}")
    width = spec.n_y * math.prod(spec.n_m)
    if width == 0:
        return np.zeros((1, 0), dtype=np.int64)
    grid = np.indices((spec.n_z,) * width, dtype=np.int64)
    return grid.reshape(width, -1).T.copy()


# ------------------------------------------------------------------ extended vertices

@dataclass(frozen=True)
class ExtendedVertex:
    behavior: tuple[Fraction, ...]
    resources: tuple[Fraction, ...]
    provenance: tuple[tuple[int, ...], int]


class ExtendedVertexSet:
    """Deduplicated generators of the extended classical polytope.

    ``points`` holds integer rows (behavior then resources) to be divided by
    ``denominator``; ``provenance[k]`` gives the encoding vertex indices and
    decoder index behind row ``k``.
    """

    def __init__(self, spec, points, denominator, provenance, encodings):
        self.spec = spec
        self.points = points
        self.denominator = int(denominator)
        self.provenance = provenance
        self.encodings = encodings

    def __len__(self):
        return self.points.shape[0]

    def __getitem__(self, k) -> ExtendedVertex:
        L = self.denominator
        row = [Fraction(int(v), L) for v in self.points[k]]
        nb = self.spec.n_behavior
        return ExtendedVertex(tuple(row[:nb]), tuple(row[nb:]), self.provenance[k])

    @property
    def behaviors(self) -> np.ndarray:
        return self.points[:, : self.spec.n_behavior] / self.denominator

    @property
    def resources(self) -> np.ndarray:
        return self.points[:, self.spec.n_behavior:] / self.denominator

    def polytope(self) -> VPolytope:
        return VPolytope.from_integer(self.points, self.denominator)


def _integer_encodings(spec, sender, cap):
    """Encoding vertices as integer arrays ``(P[k, x, m], R[k])`` with denominator."""
    s = spec.senders[sender]
    V = encoding_vertices(spec, sender, cap)
    W, L = V.integer_points()
    P = np.asarray(W[:, :-1], dtype=np.int64).reshape(-1, s.n_x, s.n_m)
    R = np.asarray(W[:, -1], dtype=np.int64)
    return P, R, int(L)


@lru_cache(maxsize=32)
def extended_vertices(
    spec: ScenarioSpec,
    cap_decoders: int = DEFAULT_DECODER_CAP,
    cap_vertices: int = DEFAULT_VERTEX_CAP,
    cap_selectors: int = DEFAULT_SELECTOR_CAP,
) -> ExtendedVertexSet:
    """Products of encoding-polytope vertices with deterministic decoders.

    Results are cached per scenario and caps; the arrays are read-only.
    """
    encs = [_integer_encodings(spec, i, cap_selectors) for i in range(spec.N)]
    G = enumerate_decoders(spec, cap_decoders)
    n_tuples = math.prod(e[0].shape[0] for e in encs)
    if n_tuples * G.shape[0] > cap_vertices:
        raise SizeOverflow(f"{n_tuples * G.shape[0]} candidate vertices exceed the cap {cap_vertices}")
    L = math.prod(e[2] for e in encs)
    # joint encoding J[t, x_vec, m_vec], scaled by L
    J = np.ones((1, 1, 1), dtype=np.int64)
    for P, _, _ in encs:
        J = np.einsum("axm,bun->abxumn", J, P).reshape(J.shape[0] * P.shape[0], J.shape[1] * P.shape[1], -1)
    R = np.zeros((1, 0), dtype=np.int64)
    for P, Rs, Li in encs:
        R = np.concatenate(
            [np.repeat(R, len(Rs), axis=0), np.tile(Rs[:, None] * (L // Li), (R.shape[0], 1))], axis=1
        )
    n_t, X, M = J.shape
    n_y, n_z = spec.n_y, spec.n_z
    n_dec = G.shape[0]
    onehot = np.zeros((n_dec, M, n_y, n_z), dtype=np.int64)
    gi = G.reshape(n_dec, M, n_y)
    d_idx, m_idx, y_idx = np.indices(gi.shape)
    onehot[d_idx, m_idx, y_idx, gi] = 1
    B = np.einsum("txm,dmyz->tdzxy", J, onehot)
    B = B.reshape(n_t, n_dec, -1)
    res = np.broadcast_to(R[:, None, :], (n_t, n_dec, spec.N))
    rows = np.concatenate([B, res], axis=2).reshape(n_t * n_dec, -1)
    rows, first = np.unique(rows, axis=0, return_index=True)
    tuples = list(itertools.product(*(range(e[0].shape[0]) for e in encs)))
    prov = [(tuples[k // n_dec], int(k % n_dec)) for k in first]
    g = reduce(math.gcd, (int(v) for v in np.unique(rows)), L)
    rows = rows // g
    rows.setflags(write=False)
    for P, Rs, _ in encs:
        P.setflags(write=False)
        Rs.setflags(write=False)
    return ExtendedVertexSet(spec, rows, L // g, prov, encs)


# ------------------------------------------------------------------ symmetries

def scenario_symmetries(spec: ScenarioSpec) -> list[CoordinatePermutation]:
    """Relabelings that preserve the extended polytope.

    Input transpositions of each sender (when the two priors agree), outcome
    transpositions, receiver-input transpositions, and the exchange of two
    senders together with their resources when their alphabets and priors
    coincide.
    """
    dim = spec.dim
    gens = []

    def from_map(fn, res_map=None):
        perm = [0] * dim
        for z, xs, y in spec.iter_behavior():
            z2, xs2, y2 = fn(z, xs, y)
            perm[spec.index(z, xs, y)] = spec.index(z2, xs2, y2)
        for i in range(spec.N):
            j = res_map[i] if res_map else i
            perm[spec.resource_index(i)] = spec.resource_index(j)
        return CoordinatePermutation(tuple(perm))

    def swap(v, a, b):
        return b if v == a else a if v == b else v

    for i, s in enumerate(spec.senders):
        for a, b in itertools.combinations(range(s.n_x), 2):
            if s.prior[a] == s.prior[b]:
                gens.append(from_map(lambda z, xs, y, i=i, a=a, b=b: (
                    z, tuple(swap(x, a, b) if k == i else x for k, x in enumerate(xs)), y)))
    for a, b in itertools.combinations(range(spec.n_z), 2):
        gens.append(from_map(lambda z, xs, y, a=a, b=b: (swap(z, a, b), xs, y)))
    for a, b in itertools.combinations(range(spec.n_y), 2):
        gens.append(from_map(lambda z, xs, y, a=a, b=b: (z, xs, swap(y, a, b))))
    for i, j in itertools.combinations(range(spec.N), 2):
        if spec.senders[i] == spec.senders[j]:
            rmap = {k: swap(k, i, j) for k in range(spec.N)}
            gens.append(from_map(
                lambda z, xs, y, i=i, j=j: (z, tuple(xs[swap(k, i, j)] for k in range(len(xs))), y), rmap))
    return [g for g in gens if not g.is_identity()]


# ------------------------------------------------------------------ linear forms

@dataclass(frozen=True)
class ResourceFacet:
    """``sum c.p <= sum r_i R_i + constant`` with integer data."""

    coeffs: tuple[int, ...]
    resource_coeffs: tuple[int, ...]
    constant: int

    @classmethod
    def from_canonical(cls, spec: ScenarioSpec, f: CanonicalFacet) -> "ResourceFacet":
        nb = spec.n_behavior
        return cls(f.coeffs[:nb], tuple(-c for c in f.coeffs[nb:]), f.bound)

    def to_canonical(self) -> CanonicalFacet:
        return CanonicalFacet(self.coeffs + tuple(-r for r in self.resource_coeffs), self.constant)

    def bound_at(self, resources: Sequence) -> Fraction:
        return sum((r * as_fraction(v) for r, v in zip(self.resource_coeffs, resources)), Fraction(self.constant))

    def render(self, spec: ScenarioSpec) -> str:
        lhs = _render_terms([(c, f"p({lab})") for c, lab in zip(self.coeffs, spec.labels)]) or "0"
        rterms = [(r, f"{spec.kind}{i + 1}") for i, r in enumerate(self.resource_coeffs)]
        rhs = _render_terms(rterms, self.constant)
        return f"{lhs} <= {rhs}"

    def coeff_map(self, spec: ScenarioSpec) -> dict[str, int]:
        return {lab: c for c, lab in zip(self.coeffs, spec.labels) if c}


def _render_terms(terms, constant=None) -> str:
    out = ""
    for c, name in terms:
        if not c:
            continue
        sign = "-" if c < 0 else "+"
        mag = "" if abs(c) == 1 else str(abs(c))
        out += f"{sign}{mag}{name}" if out else f"{'-' if c < 0 else ''}{mag}{name}"
    if constant is not None and (constant or not out):
        out += (f"{constant:+d}" if out else str(constant))
    return out


_TERM = re.compile(
    r"([+-]?)\s*(\d+(?:/\d+)?(?:\.\d+)?)?\s*\*?\s*(?:p\(\s*(\d+)\s*\|\s*([\d,\s]+)\)|([DA])_?\{?(\d+)\}?)?"
)


def parse_linear(expr: str, spec: ScenarioSpec) -> tuple[dict[int, Fraction], dict[int, Fraction], Fraction]:
    """Parse ``"2p(1|1,2) - p(3|2,1) + 4A1 - 3"``.

    Returns behavior coefficients by 0-based coordinate, resource
    coefficients by sender and the constant term.
    """
    s = expr.replace(" ", "").replace("\\leqslant", "<=")
    beh: dict[int, Fraction] = {}
    res: dict[int, Fraction] = {}
    const = Fraction(0)
    pos = 0
    if not s:
        raise ParseError("empty expression")
    while pos < len(s):
        m = _TERM.match(s, pos)
        if not m or m.end() == pos:
            raise ParseError(f"cannot parse {expr!r} near {s[pos:]!r}")
        sign, num, z, xs, rk, ri = m.groups()
        if num is None and z is None and rk is None:
            raise ParseError(f"dangling sign in {expr!r}")
        c = Fraction(num) if num else Fraction(1)
        if sign == "-":
            c = -c
        if z is not None:
            labels = [int(v) for v in xs.split(",") if v]
            n_in = spec.N + (1 if spec.n_y > 1 else 0)
            if len(labels) != n_in:
                raise ParseError(f"p({z}|{xs}) needs {n_in} input labels")
            zz = int(z) - 1
            xx = [v - 1 for v in labels[: spec.N]]
            yy = labels[spec.N] - 1 if spec.n_y > 1 else 0
            if not (0 <= zz < spec.n_z and all(0 <= a < n for a, n in zip(xx, spec.n_x)) and 0 <= yy < spec.n_y):
                raise ParseError(f"label out of range in p({z}|{xs})")
            k = spec.index(zz, xx, yy)
            beh[k] = beh.get(k, Fraction(0)) + c
        elif rk is not None:
            i = int(ri) - 1
            if not 0 <= i < spec.N:
                raise ParseError(f"resource {rk}{ri} out of range")
            res[i] = res.get(i, Fraction(0)) + c
        else:
            const += c
        pos = m.end()
    return beh, res, const


def parse_inequality(text: str, spec: ScenarioSpec) -> CanonicalFacet:
    """``"lhs <= rhs"`` into a (not yet hull-reduced) integer inequality."""
    parts = re.split(r"<=|≤|\\leqslant|\\leq", text)
    if len(parts) != 2:
        raise ParseError(f"expected one '<=' in {text!r}")
    lb, lr, lc = parse_linear(parts[0], spec)
    rb, rr, rc = parse_linear(parts[1], spec)
    coeffs = [Fraction(0)] * spec.dim
    for k, c in lb.items():
        coeffs[k] += c
    for k, c in rb.items():
        coeffs[k] -= c
    for i, c in lr.items():
        coeffs[spec.resource_index(i)] += c
    for i, c in rr.items():
        coeffs[spec.resource_index(i)] -= c
    ints = to_primitive_integers(coeffs + [rc - lc])
    return CanonicalFacet(ints[:-1], ints[-1])


@dataclass(frozen=True)
class FigureOfMerit:
    """Linear functional ``constant + sum_k coeffs[k] p_k`` over behaviors."""

    coeffs: tuple[Fraction, ...]
    constant: Fraction = Fraction(0)

    @classmethod
    def parse(cls, expr: str, spec: ScenarioSpec) -> "FigureOfMerit":
        if "<=" in expr or "≤" in expr:
            expr = re.split(r"<=|≤", expr)[0]
        beh, res, const = parse_linear(expr, spec)
        if res:
            raise ParseError("a figure of merit cannot contain resource terms")
        c = [Fraction(0)] * spec.n_behavior
        for k, v in beh.items():
            c[k] = v
        return cls(tuple(c), const)

    @classmethod
    def from_facet(cls, spec: ScenarioSpec, f) -> "FigureOfMerit":
        coeffs = f.coeffs[: spec.n_behavior]
        return cls(tuple(Fraction(c) for c in coeffs))

    @classmethod
    def from_dense(cls, coeffs, constant=0) -> "FigureOfMerit":
        return cls(tuple(as_fraction(c) if not isinstance(c, float) else Fraction(c).limit_denominator(10 ** 12)
                         for c in coeffs), as_fraction(constant))

    def array(self) -> np.ndarray:
        return np.array([float(c) for c in self.coeffs])

    def value(self, behavior) -> Fraction | float:
        if isinstance(behavior, np.ndarray) and behavior.dtype != object:
            return float(self.constant) + float(self.array() @ behavior)
        return self.constant + sum((c * as_fraction(p) for c, p in zip(self.coeffs, behavior) if c), Fraction(0))


# ------------------------------------------------------------------ facet tables

@dataclass(frozen=True)
class FacetClass:
    representative: ResourceFacet
    canonical: CanonicalFacet
    orbit_size: int
    trivial: bool
    members: tuple[CanonicalFacet, ...]


@dataclass
class FacetTable:
    spec: ScenarioSpec
    equalities: list
    facets: list
    trivial: set
    classes: list
    n_vertices: int

    @property
    def n_facets(self) -> int:
        return len(self.facets)

    @property
    def n_trivial(self) -> int:
        return len(self.trivial)

    @property
    def nontrivial_classes(self) -> list[FacetClass]:
        return [c for c in self.classes if not c.trivial]

    def class_of(self, f: CanonicalFacet) -> FacetClass | None:
        for c in self.classes:
            if f in c.members:
                return c
        return None

    def to_json(self) -> dict:
        spec = self.spec
        return {
            "scenario": spec.to_json(),
            "n_vertices": self.n_vertices,
            "n_facets": self.n_facets,
            "n_trivial": self.n_trivial,
            "classes": [
                {
                    "inequality": c.representative.render(spec),
                    "coeffs": c.representative.coeff_map(spec),
                    "resource_coeffs": list(c.representative.resource_coeffs),
                    "constant": c.representative.constant,
                    "orbit_size": c.orbit_size,
                    "trivial": c.trivial,
                }
                for c in self.classes
            ],
        }


def trivial_facets(points: np.ndarray, L: int, hull, facets: Sequence[CanonicalFacet]) -> set:
    """Facets that coincide with a single-coordinate lower or upper bound."""
    fset = set(facets)
    out = set()
    dim = points.shape[1]
    for j in range(dim):
        col = points[:, j]
        lo, hi = int(col.min()), int(col.max())
        e = [0] * dim
        e[j] = 1
        for c, b in ((e, Fraction(hi, L)), ([-v for v in e], Fraction(-lo, L))):
            f = hull.canonical(c, b)
            if f in fset:
                out.add(f)
    return out


def facet_table(
    spec: ScenarioSpec,
    generators: Sequence[CoordinatePermutation] | None = None,
    vertices: ExtendedVertexSet | None = None,
    **caps,
) -> FacetTable:
    """Facets of the extended classical polytope, orbit-classified."""
    ev = vertices if vertices is not None else extended_vertices(spec, **caps)
    V = ev.polytope()
    system = v_to_facets(V)
    hull = affine_hull(V)
    triv = trivial_facets(ev.points, ev.denominator, hull, system.facets)
    gens = scenario_symmetries(spec) if generators is None else list(generators)
    orbits = orbit_classify(system.facets, gens, V, hull)
    classes = []
    for o in orbits:
        t = o.representative in triv
        if t and not all(m in triv for m in o.members):
            t = False
        classes.append(FacetClass(ResourceFacet.from_canonical(spec, o.representative), o.representative,
                                  o.orbit_size, t, o.members))
    classes.sort(key=lambda c: (c.trivial, c.canonical))
    return FacetTable(spec, system.equalities, system.facets, triv, classes, len(ev))
