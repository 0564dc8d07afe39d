"""Star-shaped level sets of overlap functions, sampled radially.

For a normalized pair the set {x : f(x) >= theta M} is convex, contains the
origin in its interior for theta < 1, and its boundary along each ray is the
unique crossing of the monotone profile t -> f(t u).  Bodies are stored by
their radii over a fixed sphere grid.  The theta -> 1 limit is recovered
separately from one-sided derivatives at the origin.
"""

import json
from dataclasses import dataclass

import numpy as np

from . import bodies as bd
from .oracles import sphere_surface_area

_DEFAULT_COUNTS = {1: 2, 2: 4096}
_DEFAULT_COUNT_HIGH = 20000


@dataclass(frozen=True)
class SphereGrid:
    """Directions and quadrature weights on the unit sphere.

    kind is "uniform-angle" (dimension <= 2, deterministic) or
    "seeded-random" (dimension >= 3, reproducible from the seed).  Weights
    sum to the surface measure of the sphere.
    """

    dim: int
    kind: str
    seed: int
    count: int
    directions: np.ndarray
    weights: np.ndarray

    @staticmethod
    def make(dim, count=None, seed=0):
        if dim < 1:
            raise bd.DimensionMismatch("dimension must be at least 1")
        if count is None:
            count = _DEFAULT_COUNTS.get(dim, _DEFAULT_COUNT_HIGH)
        if count < 2:
            raise ValueError("need at least two directions")
        if dim == 1:
            dirs = np.array([[1.0], [-1.0]])
            w = np.array([1.0, 1.0])
            return SphereGrid(1, "uniform-angle", seed, 2, dirs, w)
        if dim == 2:
            ang = 2.0 * np.pi * np.arange(count) / count
            dirs = np.column_stack([np.cos(ang), np.sin(ang)])
            w = np.full(count, 2.0 * np.pi / count)
            return SphereGrid(2, "uniform-angle", seed, count, dirs, w)
        rng = np.random.default_rng(seed)
        g = rng.normal(size=(count, dim))
        dirs = g / np.linalg.norm(g, axis=1)[:, None]
        w = np.full(count, sphere_surface_area(dim) / count)
        return SphereGrid(dim, "seeded-random", seed, count, dirs, w)

    def compatible(self, other):
        return (self.dim == other.dim and self.kind == other.kind
                and self.seed == other.seed and self.count == other.count)


@dataclass(frozen=True)
class RadialBody:
    """A star body recorded by its radii over a sphere grid.

    Directions flagged unbounded carry radius inf; volume queries on such
    bodies raise instead of guessing.
    """

    grid: SphereGrid
    radii: np.ndarray
    unbounded: np.ndarray
    center: np.ndarray
    theta: object = None

    @property
    def dim(self):
        return self.grid.dim

    def is_bounded(self):
        return not bool(np.any(self.unbounded))


def _make_radial(grid, radii, theta=None, unbounded=None):
    radii = np.asarray(radii, dtype=float)
    if unbounded is None:
        unbounded = np.zeros(len(radii), dtype=bool)
    return RadialBody(grid, radii, unbounded, np.zeros(grid.dim), theta)


def radial_volume(rb):
    """Quadrature volume (1/n) sum w_i r_i^n; unbounded bodies raise."""
    if not rb.is_bounded():
        raise bd.UnboundedBody("radial body has unbounded directions")
    n = rb.dim
    return float(rb.grid.weights @ rb.radii ** n) / n


def radial_volume_with_error(rb):
    """Volume plus a quadrature or sampling error estimate.

    Random grids report the standard error of the spherical mean; the
    deterministic planar grid reports the change under halving the grid.
    """
    v = radial_volume(rb)
    n = rb.dim
    if rb.grid.kind == "seeded-random":
        s = sphere_surface_area(n) * rb.radii ** n / n
        se = float(np.std(s, ddof=1) / np.sqrt(len(s)))
        return v, se
    if n == 2 and rb.grid.count >= 8 and rb.grid.count % 2 == 0:
        half = rb.radii[::2]
        v_half = float(np.sum(half ** n)) * (2.0 * np.pi / len(half)) / n
        return v, abs(v - v_half)
    return v, 0.0


@dataclass(frozen=True)
class InclusionVerdict:
    """Outcome of a per-direction radial comparison."""

    included: bool
    min_slack: float
    worst_direction: int
    tol: float


def scaled_radial_compare(rb_a, s_a, rb_b, s_b, tol=None):
    """Whether rb_a / s_a sits inside rb_b / s_b, direction by direction."""
    if not rb_a.grid.compatible(rb_b.grid):
        raise bd.DimensionMismatch("radial bodies use different grids")
    ra = rb_a.radii / s_a
    rab = rb_b.radii / s_b
    both = ~(rb_a.unbounded | rb_b.unbounded)
    if tol is None:
        finite = np.concatenate([ra[both], rab[both]])
        tol = 1e-6 * (float(finite.max()) if finite.size else 1.0)
    slack = np.where(rb_b.unbounded, np.inf, rab - np.where(rb_a.unbounded, np.inf, ra))
    worst = int(np.argmin(slack))
    min_slack = float(slack[worst])
    return InclusionVerdict(min_slack >= -tol, min_slack, worst, tol)


# -- level-set radii --------------------------------------------------------


def _radii_for_thetas(source, thetas, U, rtol=1e-8, maxiter=200):
    """Level-set radii along rows of U for every theta, by cascaded bisection.

    Thetas are processed in increasing order so each level starts from the
    bracket of the previous one; a scaled guess for the lower end is kept
    only after verifying it on the spot, so no monotonicity theorem is
    assumed by the root finder.
    """
    thetas = np.atleast_1d(np.asarray(thetas, dtype=float))
    if np.any((thetas < 0.0) | (thetas >= 1.0)):
        raise ValueError("theta must lie in [0, 1)")
    U = np.atleast_2d(np.asarray(U, dtype=float))
    D = len(U)
    M = source.max_overlap
    zero_floor = 1e-14 * M
    p = 1.0 / source.root_degree
    t_up = np.maximum(source.support_sum(U), 0.0)
    scale = np.maximum(t_up, 1e-300)
    radii = np.empty((D, len(thetas)))
    order = np.argsort(thetas)
    hi = t_up.copy()
    prev_r = None
    prev_th = None
    for k in order:
        th = float(thetas[k])
        target = th * M
        lo = np.zeros(D)
        if prev_r is not None and th > 0.0:
            denom = 1.0 - prev_th ** p if prev_th > 0.0 else 1.0
            cand = np.minimum(prev_r * (1.0 - th ** p) / denom, hi * (1.0 - 1e-12))
            vals = source.value_batch(cand[:, None] * U)
            ok = vals >= target if th > 0.0 else vals > zero_floor
            lo = np.where(ok, cand, 0.0)
        it = 0
        while np.any(hi - lo > rtol * scale):
            it += 1
            if it > maxiter:
                raise bd.ConvergenceError("level-set bisection did not converge")
            mid = 0.5 * (lo + hi)
            vals = source.value_batch(mid[:, None] * U)
            ge = vals >= target if th > 0.0 else vals > zero_floor
            lo = np.where(ge, mid, lo)
            hi = np.where(ge, hi, mid)
        radii[:, k] = 0.5 * (lo + hi)
        prev_r = radii[:, k]
        prev_th = th
        # the next level is higher, so its radii sit below the current ones
    return radii


def theta_radius(pair, theta, u, rtol=1e-8):
    """Boundary radius of {f >= theta M} along the single direction u."""
    u = np.asarray(u, dtype=float)
    nu = float(np.linalg.norm(u))
    if nu <= 0.0:
        raise bd.DegenerateBody("direction must be nonzero")
    return float(_radii_for_thetas(pair, [theta], (u / nu)[None], rtol)[0, 0])


def theta_body(pair, theta, grid=None, rtol=1e-8):
    """The level set {x : f(x) >= theta M} as a radial body; theta in [0, 1)."""
    grid = SphereGrid.make(pair.dim) if grid is None else grid
    r = _radii_for_thetas(pair, [theta], grid.directions, rtol)[:, 0]
    return _make_radial(grid, r, theta=float(theta))


def theta_radii_matrix(pair, thetas, grid, rtol=1e-8):
    """Radii for a whole family of thetas over one grid, shape (D, T)."""
    return _radii_for_thetas(pair, thetas, grid.directions, rtol)


def mfold_theta_body(tup, theta, grid=None, rtol=1e-8):
    """Level set of an m-fold convolution, normalized by its maximum."""
    grid = SphereGrid.make(tup.dim) if grid is None else grid
    r = _radii_for_thetas(tup, [theta], grid.directions, rtol)[:, 0]
    return _make_radial(grid, r, theta=float(theta))


# -- the theta -> 1 limit ---------------------------------------------------


def _limit_from_derivatives(source, deriv_fn, grid):
    U = grid.directions
    d = deriv_fn(source, U)
    M = source.max_overlap
    thresh = 1e-10 * M / source.diameter()
    unb = np.abs(d) < thresh
    with np.errstate(divide="ignore"):
        radii = np.where(unb, np.inf, M / np.maximum(np.abs(d), 1e-300))
    return RadialBody(grid, radii, unb, np.zeros(grid.dim), None)


def limit_body(pair, grid=None):
    """Limit of (theta-body)/(1 - theta) as theta -> 1, via derivatives.

    Along u the boundary satisfies f(t u) = theta M, and linearizing f at
    the origin gives radius M / |f'(0+; u)| after dividing by 1 - theta.
    Directions with vanishing derivative are flagged unbounded.
    """
    from . import convolution as cv

    grid = SphereGrid.make(pair.dim) if grid is None else grid
    return _limit_from_derivatives(pair, cv.derivative_batch, grid)


def mfold_limit_body(tup, grid=None):
    from . import convolution as cv

    grid = SphereGrid.make(tup.dim) if grid is None else grid
    return _limit_from_derivatives(tup, cv.mfold_derivative_batch, grid)


# -- serialization ----------------------------------------------------------


def radial_body_to_json(rb, meta=None):
    doc = {
        "format": "radial-body/1",
        "dim": rb.dim,
        "theta": rb.theta,
        "center": [float(c) for c in rb.center],
        "grid": {"kind": rb.grid.kind, "seed": rb.grid.seed,
                 "count": rb.grid.count},
        "radii": [None if u else float(r)
                  for r, u in zip(rb.radii, rb.unbounded)],
    }
    if meta:
        doc["meta"] = meta
    return json.dumps(doc, indent=1)


def radial_body_from_json(text):
    doc = json.loads(text)
    if doc.get("format") != "radial-body/1":
        raise ValueError("not a radial body file")
    grid = SphereGrid.make(doc["dim"], doc["grid"]["count"], doc["grid"]["seed"])
    if grid.kind != doc["grid"]["kind"]:
        raise ValueError("grid kind does not match dimension")
    vals = doc["radii"]
    unb = np.array([v is None for v in vals])
    radii = np.array([np.inf if v is None else float(v) for v in vals])
    center = np.asarray(doc["center"], dtype=float)
    return RadialBody(grid, radii, unb, center, doc.get("theta"))
