"""Polar projection bodies and radial hulls.

The polar projection body of K is the unit ball of the norm
|x| * (shadow area of K on the hyperplane orthogonal to x), so its radial
function in direction u is the reciprocal of that shadow.  Shadows of
polytopes come from the facet-sum formula and are exact; the quadrature
error lives only in volume integrals over the grid.
"""

import numpy as np
from scipy.spatial import ConvexHull, QhullError

from . import bodies as bd
from .thetabody import RadialBody, SphereGrid, radial_volume


def polar_projection_body(K, grid=None):
    """Radial body with radius 1 / |shadow of K orthogonal to u|."""
    grid = SphereGrid.make(K.dim) if grid is None else grid
    if grid.dim != K.dim:
        raise bd.DimensionMismatch("grid dimension does not match body")
    shadows = bd.projection_volume_batch(K, grid.directions)
    radii = 1.0 / shadows
    return RadialBody(grid, radii, np.zeros(grid.count, dtype=bool),
                      np.zeros(K.dim), None)


def petty_zhang_functional(K, grid=None):
    """|K|^(n-1) times the volume of the polar projection body.

    Affine-invariant; over all convex bodies it is maximized by ellipsoids
    and minimized by simplices.
    """
    grid = SphereGrid.make(K.dim) if grid is None else grid
    rb = polar_projection_body(K, grid)
    return bd.volume(K) ** (K.dim - 1) * radial_volume(rb)


def hull_union(rb_a, rb_b):
    """Radial body of conv(A union B) for two star bodies on one grid.

    Boundary samples of both bodies are hulled and the radial function of
    the hull is re-extracted exactly from its facet system.
    """
    if not rb_a.grid.compatible(rb_b.grid):
        raise bd.DimensionMismatch("radial bodies use different grids")
    if np.max(np.abs(rb_a.center - rb_b.center)) > 1e-12:
        raise bd.DimensionMismatch("radial bodies have different centers")
    if not (rb_a.is_bounded() and rb_b.is_bounded()):
        raise bd.UnboundedBody("hull of unbounded bodies is not supported")
    grid = rb_a.grid
    U = grid.directions
    if grid.dim == 1:
        radii = np.maximum(rb_a.radii, rb_b.radii)
        return RadialBody(grid, radii, np.zeros(grid.count, bool),
                          rb_a.center.copy(), None)
    pts = np.vstack([rb_a.radii[:, None] * U, rb_b.radii[:, None] * U])
    try:
        hull = ConvexHull(pts)
    except QhullError as exc:
        raise bd.DegenerateBody("union samples are not full-dimensional") from exc
    A = hull.equations[:, :-1]
    b = -hull.equations[:, -1]
    if np.min(b) <= bd.TOL.tiny:
        raise bd.OriginNotInterior("hull does not surround the common center")
    D = A @ U.T
    with np.errstate(divide="ignore"):
        ratios = np.where(D > bd.TOL.unit_norm, b[:, None] / D, np.inf)
    radii = ratios.min(axis=0)
    return RadialBody(grid, radii, np.zeros(grid.count, bool),
                      rb_a.center.copy(), None)
