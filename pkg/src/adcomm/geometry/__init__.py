"""Exact polyhedral computation."""
from .exact import as_fraction, fmt
from .dd import LinealityError, extreme_rays
from .polytope import (
    AffineHull,
    CanonicalFacet,
    DimensionMismatch,
    FacetCheck,
    FacetSystem,
    GeometryError,
    HPolyhedron,
    Infeasible,
    Unbounded,
    VPolytope,
    affine_hull,
    h_to_v,
    hpolyhedron_from_json,
    hpolyhedron_to_json,
    validate_facet,
    v_to_facets,
    vpolytope_from_json,
    vpolytope_to_json,
)
from .symmetry import CoordinatePermutation, InvalidSymmetry, Orbit, group_order, orbit_classify

__all__ = [
    "AffineHull",
    "CanonicalFacet",
    "CoordinatePermutation",
    "DimensionMismatch",
    "FacetCheck",
    "FacetSystem",
    "GeometryError",
    "HPolyhedron",
    "Infeasible",
    "InvalidSymmetry",
    "LinealityError",
    "Orbit",
    "Unbounded",
    "VPolytope",
    "affine_hull",
    "as_fraction",
    "extreme_rays",
    "fmt",
    "group_order",
    "h_to_v",
    "hpolyhedron_from_json",
    "hpolyhedron_to_json",
    "orbit_classify",
    "v_to_facets",
    "validate_facet",
    "vpolytope_from_json",
    "vpolytope_to_json",
]
