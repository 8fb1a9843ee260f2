"""Coordinate permutations and orbit classification of facets."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Sequence

from .polytope import AffineHull, CanonicalFacet, GeometryError, VPolytope, affine_hull


class InvalidSymmetry(GeometryError):
    pass


@dataclass(frozen=True)
class CoordinatePermutation:
    """Sends coordinate ``i`` to position ``perm[i]`` (0-based)."""

    perm: tuple[int, ...]

    def __post_init__(self):
        p = tuple(int(i) for i in self.perm)
        if sorted(p) != list(range(len(p))):
            raise InvalidSymmetry(f"not a permutation: {p}")
        object.__setattr__(self, "perm", p)

    @classmethod
    def from_one_based(cls, perm: Sequence[int]) -> "CoordinatePermutation":
        return cls(tuple(i - 1 for i in perm))

    @classmethod
    def from_mapping(cls, dim: int, mapping: dict[int, int]) -> "CoordinatePermutation":
        perm = list(range(dim))
        for i, j in mapping.items():
            perm[i] = j
        return cls(tuple(perm))

    def __len__(self):
        return len(self.perm)

    def apply(self, x: Sequence) -> tuple:
        out = [None] * len(self.perm)
        for i, j in enumerate(self.perm):
            out[j] = x[i]
        return tuple(out)

    def compose(self, other: "CoordinatePermutation") -> "CoordinatePermutation":
        """``self`` after ``other``."""
        return CoordinatePermutation(tuple(self.perm[j] for j in other.perm))

    def is_identity(self) -> bool:
        return all(i == j for i, j in enumerate(self.perm))


def check_automorphism(v: VPolytope, g: CoordinatePermutation) -> bool:
    pts = set(v.vertices)
    return len(g) == v.dim and all(g.apply(p) in pts for p in v.vertices)


def group_order(generators: Sequence[CoordinatePermutation], limit: int = 10 ** 6) -> int:
    """Order of the generated permutation group by closure."""
    if not generators:
        return 1
    ident = tuple(range(len(generators[0])))
    seen = {ident}
    queue = deque([ident])
    while queue:
        p = queue.popleft()
        for g in generators:
            q = tuple(g.perm[j] for j in p)
            if q not in seen:
                seen.add(q)
                if len(seen) > limit:
                    raise GeometryError("group closure exceeds limit")
                queue.append(q)
    return len(seen)


@dataclass(frozen=True)
class Orbit:
    representative: CanonicalFacet
    orbit_size: int
    members: tuple[CanonicalFacet, ...]


def orbit_classify(
    facets: Iterable[CanonicalFacet],
    generators: Sequence[CoordinatePermutation],
    polytope: VPolytope | None = None,
    hull: AffineHull | None = None,
) -> list[Orbit]:
    """Partition ``facets`` into orbits of the group spanned by ``generators``.

    Permuted facets are re-canonicalized modulo the affine hull of
    ``polytope`` (or ``hull``) before lookup. Each generator must map the
    point set onto itself and the facet list onto itself.
    """
    facets = sorted(set(facets))
    if polytope is not None:
        for g in generators:
            if not check_automorphism(polytope, g):
                raise InvalidSymmetry(f"{g.perm} does not preserve the vertex set")
        if hull is None:
            hull = affine_hull(polytope)
    fset = set(facets)

    def image(f: CanonicalFacet, g: CoordinatePermutation) -> CanonicalFacet:
        c = g.apply(f.coeffs)
        if hull is not None:
            return hull.canonical(c, f.bound)
        return CanonicalFacet(c, f.bound)

    seen: set[CanonicalFacet] = set()
    out = []
    for f in facets:
        if f in seen:
            continue
        orbit = {f}
        queue = deque([f])
        while queue:
            h = queue.popleft()
            for g in generators:
                k = image(h, g)
                if k not in fset:
                    raise InvalidSymmetry(f"{g.perm} maps a facet outside the facet list")
                if k not in orbit:
                    orbit.add(k)
                    queue.append(k)
        seen |= orbit
        members = tuple(sorted(orbit))
        out.append(Orbit(members[0], len(members), members))
    return out
