"""Convex bodies in R^n (n <= 4) with exact polytope arithmetic.

Bodies come in three representations: halfspace intersections, vertex hulls,
and Euclidean balls.  Polytopes materialize both representations eagerly at
construction, which keeps every later operation (volume, support, gauge,
projections) exact and cheap at this scale.  Vertex enumeration is a brute
force sweep over facet subsets, adequate for at most a few dozen facets in
dimension up to six.
"""

import itertools
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog
from scipy.spatial import ConvexHull, QhullError

from .oracles import unit_ball_volume


class GeometryError(Exception):
    """Base class for all geometric failures."""


class DimensionMismatch(GeometryError):
    pass


class DegenerateBody(GeometryError):
    pass


class UnsupportedRepresentation(GeometryError):
    pass


class OriginNotInterior(GeometryError):
    pass


class ConvergenceError(GeometryError):
    pass


class ResourceLimit(GeometryError):
    pass


class UnboundedBody(GeometryError):
    pass


@dataclass(frozen=True)
class GeomTol:
    """Shared numeric tolerances.

    facet_slack: absolute slack allowed on facet inequalities
    unit_norm: allowed deviation of stored normals from unit length
    dedup: vertex deduplication distance
    tiny: threshold under which a volume counts as zero
    """

    facet_slack: float = 1e-9
    unit_norm: float = 1e-12
    dedup: float = 1e-9
    tiny: float = 1e-14


TOL = GeomTol()

_MAX_FACETS = 64
_MAX_SUBSETS = 600_000


@dataclass(frozen=True)
class AffineMap:
    """x -> matrix @ x + translation."""

    matrix: np.ndarray
    translation: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=float)
        t = np.asarray(self.translation, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DimensionMismatch("matrix must be square")
        if t.shape != (m.shape[0],):
            raise DimensionMismatch("translation length must match matrix")
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "translation", t)

    @property
    def dim(self):
        return self.matrix.shape[0]

    def det(self):
        return float(np.linalg.det(self.matrix))

    def __call__(self, x):
        return np.asarray(x, dtype=float) @ self.matrix.T + self.translation


def translation(vector):
    v = np.asarray(vector, dtype=float)
    return AffineMap(np.eye(v.size), v)


def scaling(dim, factor):
    return AffineMap(float(factor) * np.eye(dim), np.zeros(dim))


class ConvexBody:
    """Common base; concrete bodies are HPolytope, VPolytope, Ball."""

    dim = None


def _dedup_points(pts, tol):
    """Merge points closer than tol; order-stable on the survivors."""
    if len(pts) == 0:
        return pts
    scale = max(1.0, float(np.max(np.abs(pts))))
    keep = []
    for p in pts:
        for q in keep:
            if np.max(np.abs(p - q)) <= tol * scale:
                break
        else:
            keep.append(p)
    return np.array(keep)


def _prepare_subsets(A, rcond=1e-10):
    """All dim-subsets of facet rows with invertible submatrices.

    Returns (index array (S, d), stacked inverses (S, d, d)).  Shared by
    vertex enumeration here and by the lifted-polytope evaluators, which
    reuse the inverses across many offset vectors.
    """
    F, d = A.shape
    if F > _MAX_FACETS:
        raise ResourceLimit(f"{F} facets exceeds the supported {_MAX_FACETS}")
    n_sub = math.comb(F, d)
    if n_sub > _MAX_SUBSETS:
        raise ResourceLimit("too many facet subsets to enumerate")
    idx = np.array(list(itertools.combinations(range(F), d)), dtype=np.intp)
    mats = A[idx]
    dets = np.abs(np.linalg.det(mats))
    good = dets > rcond
    idx = idx[good]
    if len(idx) == 0:
        raise DegenerateBody("no invertible facet subsets")
    inv = np.linalg.inv(A[idx])
    return idx, inv


def _solve_candidate_vertices(idx, inv, b):
    """Candidate vertices inv_k @ b[idx_k] for every prepared subset."""
    return np.einsum("kij,kj->ki", inv, b[idx])


def enumerate_vertices(A, b, tol=None):
    """Vertices of {x : A x <= b} by brute force over facet subsets."""
    tol = TOL.facet_slack if tol is None else tol
    idx, inv = _prepare_subsets(A)
    cand = _solve_candidate_vertices(idx, inv, b)
    slack = cand @ A.T - b
    feas = np.all(slack <= tol * max(1.0, float(np.max(np.abs(b))) or 1.0), axis=1)
    pts = cand[feas]
    if len(pts) == 0:
        raise DegenerateBody("halfspace system has no feasible vertices")
    return _dedup_points(pts, TOL.dedup)


def _axis_extent_bounded(A, b):
    """True iff {A x <= b} is bounded (checked along +-each axis by LP)."""
    d = A.shape[1]
    for i in range(d):
        for sign in (1.0, -1.0):
            c = np.zeros(d)
            c[i] = -sign
            res = linprog(c, A_ub=A, b_ub=b, bounds=[(None, None)] * d,
                          method="highs")
            if res.status == 3:
                return False
    return True


def _hull_volume(points, dim):
    if dim == 1:
        return float(np.max(points) - np.min(points))
    try:
        return float(ConvexHull(points).volume)
    except QhullError as exc:
        raise DegenerateBody("point set is not full-dimensional") from exc


def _simplex_facet_area(verts):
    """(d-1)-measure of the simplex spanned by d points in R^d."""
    E = verts[1:] - verts[0]
    g = E @ E.T
    d = E.shape[0]
    val = float(np.linalg.det(g))
    if val < 0.0:
        val = 0.0
    return math.sqrt(val) / math.factorial(d)


class _Polytope(ConvexBody):
    """Shared machinery; both halfspace and vertex data are always present."""

    def __init__(self, vertices, A, b):
        self.vertices = vertices
        self.A = A
        self.b = b
        self.dim = vertices.shape[1]
        self._facets = None
        self._ccw = None

    # -- derived data ----------------------------------------------------

    def interior_point(self):
        return self.vertices.mean(axis=0)

    def diameter(self):
        V = self.vertices
        d2 = ((V[:, None, :] - V[None, :, :]) ** 2).sum(axis=2)
        return math.sqrt(float(d2.max()))

    def facet_data(self):
        """Triangulated facets as (normals (m, n), areas (m,)).

        In dimension 1 the two endpoints count as facets of measure one.
        """
        if self._facets is None:
            if self.dim == 1:
                normals = np.array([[1.0], [-1.0]])
                areas = np.array([1.0, 1.0])
            else:
                hull = ConvexHull(self.vertices)
                normals = hull.equations[:, :-1]
                areas = np.array([
                    _simplex_facet_area(hull.points[s]) for s in hull.simplices
                ])
            self._facets = (normals, areas)
        return self._facets

    def ccw_vertices(self):
        """Polygon vertices in counterclockwise order (dimension 2 only)."""
        if self.dim != 2:
            raise UnsupportedRepresentation("ccw ordering is for polygons")
        if self._ccw is None:
            hull = ConvexHull(self.vertices)
            self._ccw = np.ascontiguousarray(hull.points[hull.vertices])
        return self._ccw

    def as_box(self):
        """(lo, hi) bounds when every facet normal is +-an axis vector."""
        A, b = self.A, self.b
        n = self.dim
        lo = np.full(n, -np.inf)
        hi = np.full(n, np.inf)
        for row, off in zip(A, b):
            i = int(np.argmax(np.abs(row)))
            rest = np.abs(row).sum() - abs(row[i])
            if rest > TOL.unit_norm or abs(abs(row[i]) - 1.0) > TOL.unit_norm:
                return None
            if row[i] > 0:
                hi[i] = min(hi[i], off)
            else:
                lo[i] = max(lo[i], -off)
        if np.any(~np.isfinite(lo)) or np.any(~np.isfinite(hi)):
            return None
        return lo, hi


def _normalize_rows(A, b):
    norms = np.linalg.norm(A, axis=1)
    if np.any(norms <= TOL.unit_norm):
        raise DegenerateBody("zero facet normal")
    return A / norms[:, None], b / norms


class HPolytope(_Polytope):
    """Bounded intersection of halfspaces {x : A x <= b} with unit normals."""

    def __init__(self, normals, offsets):
        A = np.asarray(normals, dtype=float)
        b = np.asarray(offsets, dtype=float)
        if A.ndim != 2 or b.ndim != 1 or A.shape[0] != b.shape[0]:
            raise DimensionMismatch("normals and offsets do not align")
        d = A.shape[1]
        if d < 1:
            raise DimensionMismatch("dimension must be at least 1")
        A, b = _normalize_rows(A, b)
        if not _axis_extent_bounded(A, b):
            raise UnboundedBody("halfspace intersection is unbounded")
        verts = enumerate_vertices(A, b)
        if len(verts) < d + 1:
            raise DegenerateBody("fewer than dim+1 vertices")
        if np.linalg.matrix_rank(verts - verts[0], tol=1e-9) < d:
            raise DegenerateBody("vertices do not span the space")
        super().__init__(verts, A, b)


class VPolytope(_Polytope):
    """Convex hull of a finite point set, stored with its facet system."""

    def __init__(self, points):
        V = np.asarray(points, dtype=float)
        if V.ndim != 2:
            raise DimensionMismatch("points must be a 2-d array")
        d = V.shape[1]
        if d < 1:
            raise DimensionMismatch("dimension must be at least 1")
        if d == 1:
            lo, hi = float(V.min()), float(V.max())
            if hi - lo <= TOL.dedup:
                raise DegenerateBody("interval has no length")
            verts = np.array([[lo], [hi]])
            A = np.array([[1.0], [-1.0]])
            b = np.array([hi, -lo])
        else:
            if len(V) < d + 1:
                raise DegenerateBody("need at least dim+1 points")
            try:
                hull = ConvexHull(V)
            except QhullError as exc:
                raise DegenerateBody("points are not full-dimensional") from exc
            verts = hull.points[hull.vertices]
            A = hull.equations[:, :-1]
            b = -hull.equations[:, -1]
            # qhull triangulates facets, so coplanar duplicates are dropped
            rows = np.round(np.column_stack([A, b]) / 1e-9)
            _, keep = np.unique(rows, axis=0, return_index=True)
            keep = np.sort(keep)
            A, b = A[keep], b[keep]
        super().__init__(verts, A, b)


class Ball(ConvexBody):
    """Euclidean ball with positive radius."""

    def __init__(self, center, radius):
        c = np.atleast_1d(np.asarray(center, dtype=float))
        r = float(radius)
        if c.ndim != 1:
            raise DimensionMismatch("center must be a vector")
        if r <= 0.0:
            raise DegenerateBody("radius must be positive")
        self.center = c
        self.radius = r
        self.dim = c.size

    def diameter(self):
        return 2.0 * self.radius

    def interior_point(self):
        return self.center.copy()


# -- named bodies --------------------------------------------------------


def cube(n, half_width=0.5):
    """Axis-aligned cube [-half_width, half_width]^n."""
    A = np.vstack([np.eye(n), -np.eye(n)])
    b = np.full(2 * n, float(half_width))
    return HPolytope(A, b)


def standard_simplex(n):
    """conv{0, e_1, ..., e_n}."""
    return VPolytope(np.vstack([np.zeros(n), np.eye(n)]))


def cross_polytope(n):
    """conv{+-e_1, ..., +-e_n}."""
    return VPolytope(np.vstack([np.eye(n), -np.eye(n)]))


# -- operations -----------------------------------------------------------


def contains(body, x, tol=None):
    """Membership with each facet (or the radius) inflated by tol."""
    tol = TOL.facet_slack if tol is None else tol
    x = np.asarray(x, dtype=float)
    if x.shape != (body.dim,):
        raise DimensionMismatch("point dimension does not match body")
    if isinstance(body, Ball):
        return float(np.linalg.norm(x - body.center)) <= body.radius + tol
    return bool(np.all(body.A @ x <= body.b + tol))


def contains_batch(body, X, tol=None):
    tol = TOL.facet_slack if tol is None else tol
    X = np.asarray(X, dtype=float)
    if isinstance(body, Ball):
        return np.linalg.norm(X - body.center, axis=1) <= body.radius + tol
    return np.all(X @ body.A.T <= body.b + tol, axis=1)


def volume(body):
    """Exact volume; polytopes go through the hull of their vertices."""
    if isinstance(body, Ball):
        return unit_ball_volume(body.dim) * body.radius ** body.dim
    return _hull_volume(body.vertices, body.dim)


def support(body, u):
    u = np.asarray(u, dtype=float)
    if isinstance(body, Ball):
        return float(body.center @ u) + body.radius * float(np.linalg.norm(u))
    return float(np.max(body.vertices @ u))


def support_batch(body, U):
    U = np.asarray(U, dtype=float)
    if isinstance(body, Ball):
        return U @ body.center + body.radius * np.linalg.norm(U, axis=1)
    return np.max(U @ body.vertices.T, axis=1)


def gauge(body, x):
    """Minkowski functional of a body with the origin in its interior."""
    x = np.asarray(x, dtype=float)
    if isinstance(body, Ball):
        c, r = body.center, body.radius
        cc = float(c @ c)
        if cc >= r * r:
            raise OriginNotInterior("ball does not contain the origin")
        xc = float(x @ c)
        xx = float(x @ x)
        denom = r * r - cc
        return (math.sqrt(xc * xc + denom * xx) - xc) / denom
    if np.any(body.b <= TOL.tiny):
        raise OriginNotInterior("origin is not interior to the polytope")
    return float(np.max(np.maximum(body.A @ x, 0.0) / body.b))


def minkowski_sum(K, L):
    """Vertex-sum hull of two polytopes of equal dimension."""
    if isinstance(K, Ball) or isinstance(L, Ball):
        raise UnsupportedRepresentation("Minkowski sum needs two polytopes")
    if K.dim != L.dim:
        raise DimensionMismatch("summands live in different dimensions")
    sums = (K.vertices[:, None, :] + L.vertices[None, :, :]).reshape(-1, K.dim)
    return VPolytope(sums)


def intersect(K, Q):
    """Intersection of two halfspace systems, or None when it has no bulk.

    Accepts any polytopes; returns an HPolytope, or None if the intersection
    is empty or has measure zero (detected by a Chebyshev-center LP).
    """
    if isinstance(K, Ball) or isinstance(Q, Ball):
        raise UnsupportedRepresentation("intersection needs two polytopes")
    if K.dim != Q.dim:
        raise DimensionMismatch("bodies live in different dimensions")
    A = np.vstack([K.A, Q.A])
    b = np.concatenate([K.b, Q.b])
    d = K.dim
    c = np.zeros(d + 1)
    c[-1] = -1.0
    A_ub = np.column_stack([A, np.ones(len(A))])
    res = linprog(c, A_ub=A_ub, b_ub=b, bounds=[(None, None)] * d + [(0, None)],
                  method="highs")
    if res.status != 0 or res.x is None or res.x[-1] <= 1e-12:
        return None
    return HPolytope(A, b)


def apply(amap, body):
    """Image of a body under an invertible affine map.

    Balls only transform under conformal maps (scalar times orthogonal);
    anything else raises.
    """
    T = amap.matrix
    v = amap.translation
    if amap.dim != body.dim:
        raise DimensionMismatch("map dimension does not match body")
    det = amap.det()
    if abs(det) < 1e-12:
        raise DegenerateBody("affine map is singular")
    if isinstance(body, Ball):
        gram = T.T @ T
        lam2 = float(np.trace(gram)) / body.dim
        if not np.allclose(gram, lam2 * np.eye(body.dim), atol=1e-9 * max(lam2, 1.0)):
            raise UnsupportedRepresentation("balls transform only conformally")
        lam = math.sqrt(lam2)
        return Ball(T @ body.center + v, lam * body.radius)
    if isinstance(body, VPolytope):
        return VPolytope(body.vertices @ T.T + v)
    Tinv = np.linalg.inv(T)
    A_new = body.A @ Tinv
    b_new = body.b + A_new @ v
    return HPolytope(A_new, b_new)


def reflect(body):
    """The reflection -K through the origin."""
    if isinstance(body, Ball):
        return Ball(-body.center, body.radius)
    if isinstance(body, VPolytope):
        return VPolytope(-body.vertices)
    return HPolytope(-body.A, body.b)


def translate(body, vector):
    return apply(translation(vector), body)


def projection_volume(body, u):
    """(n-1)-volume of the shadow of the body on the hyperplane normal to u.

    Polytopes use the facet-sum formula: the shadow equals half the sum of
    facet areas weighted by |<facet normal, u>|.  In dimension 1 the shadow
    is a point of measure one.
    """
    u = np.asarray(u, dtype=float)
    nu = float(np.linalg.norm(u))
    if nu <= TOL.unit_norm:
        raise DegenerateBody("direction must be nonzero")
    u = u / nu
    if isinstance(body, Ball):
        return unit_ball_volume(body.dim - 1) * body.radius ** (body.dim - 1)
    normals, areas = body.facet_data()
    return 0.5 * float(areas @ np.abs(normals @ u))


def projection_volume_batch(body, U):
    U = np.asarray(U, dtype=float)
    U = U / np.linalg.norm(U, axis=1)[:, None]
    if isinstance(body, Ball):
        val = unit_ball_volume(body.dim - 1) * body.radius ** (body.dim - 1)
        return np.full(len(U), val)
    normals, areas = body.facet_data()
    return 0.5 * (np.abs(U @ normals.T) @ areas)


def radial_of_polytope(body, U):
    """Exact radial function of a polytope containing the origin inside."""
    if isinstance(body, Ball):
        raise UnsupportedRepresentation("polytopes only")
    if np.any(body.b <= TOL.tiny):
        raise OriginNotInterior("origin is not interior to the polytope")
    U = np.asarray(U, dtype=float)
    D = body.A @ U.T
    with np.errstate(divide="ignore"):
        ratios = np.where(D > TOL.unit_norm, body.b[:, None] / D, np.inf)
    return ratios.min(axis=0)


def bodies_equal(K, L, tol=1e-9):
    """Set equality of two bodies at tolerance (same representation family)."""
    if K.dim != L.dim:
        return False
    if isinstance(K, Ball) != isinstance(L, Ball):
        return False
    if isinstance(K, Ball):
        scale = max(1.0, K.radius)
        return (abs(K.radius - L.radius) <= tol * scale
                and float(np.max(np.abs(K.center - L.center))) <= tol * scale)
    VK, VL = K.vertices, L.vertices
    if len(VK) != len(VL):
        return False
    scale = max(1.0, float(np.max(np.abs(VK))))
    order_k = np.lexsort(VK.T)
    order_l = np.lexsort(VL.T)
    return bool(np.max(np.abs(VK[order_k] - VL[order_l])) <= tol * scale)


def is_symmetric(body, tol=1e-9):
    """Whether the body equals its reflection through the origin."""
    return bodies_equal(body, reflect(body), tol)
