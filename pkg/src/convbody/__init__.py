"""Overlap bodies of convex sets and the inequalities that bind them.

The central object is the level set {x : |K cap (x - L)| >= theta M} of the
overlap function of two convex bodies, together with its theta -> 1 limit,
polar projection bodies, m-fold analogues, and numerical checkers for the
volume inequalities relating them all.
"""

from .bodies import (
    AffineMap,
    Ball,
    ConvergenceError,
    DegenerateBody,
    DimensionMismatch,
    GeometryError,
    HPolytope,
    OriginNotInterior,
    ResourceLimit,
    UnboundedBody,
    UnsupportedRepresentation,
    VPolytope,
    cross_polytope,
    cube,
    minkowski_sum,
    reflect,
    standard_simplex,
    translate,
    volume,
)
from .convolution import (
    NormalizedPair,
    NormalizedTuple,
    intersection_volume,
    max_intersection,
    mfold_normalize,
    mfold_value,
    normalize,
)
from .inequalities import (
    InequalityReport,
    all_passed,
    check_bm_theta,
    check_equivalent_forms,
    check_inclusion_chain,
    check_mfold,
    check_monotonicity,
    check_rogers_shephard,
    check_zhang_extension,
    detect_equality_case,
    fuzz,
    reports_to_csv,
    reports_to_json,
)
from .projbody import hull_union, petty_zhang_functional, polar_projection_body
from .thetabody import (
    RadialBody,
    SphereGrid,
    limit_body,
    mfold_limit_body,
    mfold_theta_body,
    radial_body_from_json,
    radial_body_to_json,
    radial_volume,
    radial_volume_with_error,
    scaled_radial_compare,
    theta_body,
    theta_radius,
)

__version__ = "0.1.0"

__all__ = [
    "AffineMap", "Ball", "HPolytope", "VPolytope", "RadialBody", "SphereGrid",
    "NormalizedPair", "NormalizedTuple", "InequalityReport",
    "GeometryError", "DimensionMismatch", "DegenerateBody",
    "UnsupportedRepresentation", "OriginNotInterior", "ConvergenceError",
    "ResourceLimit", "UnboundedBody",
    "cube", "standard_simplex", "cross_polytope", "volume", "minkowski_sum",
    "reflect", "translate",
    "normalize", "max_intersection", "intersection_volume",
    "mfold_normalize", "mfold_value",
    "theta_body", "theta_radius", "mfold_theta_body", "limit_body",
    "mfold_limit_body", "radial_volume", "radial_volume_with_error",
    "scaled_radial_compare", "radial_body_to_json", "radial_body_from_json",
    "polar_projection_body", "petty_zhang_functional", "hull_union",
    "check_bm_theta", "check_equivalent_forms", "check_monotonicity",
    "check_inclusion_chain", "check_zhang_extension", "check_rogers_shephard",
    "check_mfold", "detect_equality_case", "fuzz", "all_passed",
    "reports_to_csv", "reports_to_json",
]
