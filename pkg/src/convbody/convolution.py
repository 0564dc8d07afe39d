"""Overlap volumes f(x) = |K cap (x - L)|, their maxima, and m-fold analogues.

The overlap function of a pair of convex bodies is supported on K + L and
its n-th root is concave there, so the maximum is unique up to a flat face
and a translate of K places it at the origin.  The m-fold analogue replaces
K cap (x - L) by a lifted overlap polytope living in R^((m-1) n) whose
volume is the m-fold convolution of the indicators at x.
"""

import functools
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from . import bodies as bd
from . import _kernels
from ._kernels import clip_area_param, interval_length_param
from .oracles import unit_ball_volume
from .oracles import _cap_integral

MIN_MAX_OVERLAP = 1e-14
_MC_SAMPLES = 200_000
_MC_SEED = 1618033


def _lens_volume(n, dist, r1, r2):
    """Volume of the intersection of balls with radii r1, r2 at center
    distance dist (vectorized over dist).  Closed form for n <= 3, split
    Gauss-Legendre cap quadrature above."""
    d = np.atleast_1d(np.asarray(dist, dtype=float))
    rmin, rmax = min(r1, r2), max(r1, r2)
    out = np.zeros(d.shape)
    inside = d <= rmax - rmin
    out[inside] = unit_ball_volume(n) * rmin ** n
    mid = (~inside) & (d < r1 + r2)
    dm = d[mid]
    if dm.size:
        if n == 1:
            out[mid] = np.maximum(r1 + r2 - dm, 0.0)
        elif n == 2:
            a1 = np.clip((dm * dm + r1 * r1 - r2 * r2) / (2.0 * dm * r1), -1, 1)
            a2 = np.clip((dm * dm + r2 * r2 - r1 * r1) / (2.0 * dm * r2), -1, 1)
            s = (-dm + r1 + r2) * (dm + r1 - r2) * (dm - r1 + r2) * (dm + r1 + r2)
            out[mid] = (r1 * r1 * np.arccos(a1) + r2 * r2 * np.arccos(a2)
                        - 0.5 * np.sqrt(np.maximum(s, 0.0)))
        elif n == 3:
            out[mid] = (math.pi * (r1 + r2 - dm) ** 2
                        * (dm * dm + 2.0 * dm * (r1 + r2) - 3.0 * (r1 - r2) ** 2)
                        / (12.0 * dm))
        else:
            om = unit_ball_volume(n - 1)
            vals = np.empty(dm.shape)
            for i, dd in enumerate(dm):
                x0 = (dd * dd + r1 * r1 - r2 * r2) / (2.0 * dd)
                cap1 = om * r1 ** n * _cap_integral(x0 / r1, 1.0, n)
                cap2 = om * r2 ** n * _cap_integral((dd - x0) / r2, 1.0, n)
                vals[i] = cap1 + cap2
            out[mid] = vals
    return out


# -- evaluators -----------------------------------------------------------


class _BoxPair:
    """Both bodies are axis-aligned boxes; per-axis overlap product."""

    exact = True

    def __init__(self, boxK, boxL):
        self.loK, self.hiK = boxK
        self.loL, self.hiL = boxL

    def value_batch(self, X):
        upper = np.minimum(self.hiK, X - self.loL)
        lower = np.maximum(self.loK, X - self.hiL)
        return np.prod(np.clip(upper - lower, 0.0, None), axis=1)

    def mc_se(self, values):
        return np.zeros_like(values)


class _BallPair:
    exact = True

    def __init__(self, K, L):
        self.center = K.center + L.center
        self.r1 = K.radius
        self.r2 = L.radius
        self.n = K.dim

    def value_batch(self, X):
        d = np.linalg.norm(X - self.center, axis=1)
        return _lens_volume(self.n, d, self.r1, self.r2)

    def mc_se(self, values):
        return np.zeros_like(values)


class _PolyPair2D:
    """Clip K (as subject polygon) against the reflected translate of L."""

    exact = True

    def __init__(self, K, L):
        self.subj = np.ascontiguousarray(K.ccw_vertices())
        self.N = np.ascontiguousarray(-L.A)
        self.c0 = np.ascontiguousarray(L.b)
        self.CX = np.ascontiguousarray(L.A)

    def value_batch(self, X):
        X = np.ascontiguousarray(np.atleast_2d(X))
        return clip_area_param(self.subj, self.N, self.c0, self.CX, X)

    def mc_se(self, values):
        return np.zeros_like(values)


class _PolyPairND:
    """General polytope pair: enumerate overlap vertices per query point."""

    exact = True

    def __init__(self, K, L):
        self.A = np.vstack([K.A, -L.A])
        self.b0 = np.concatenate([K.b, L.b])
        nL = L.A.shape[0]
        self.CX = np.zeros((len(self.b0), K.dim))
        self.CX[-nL:] = L.A
        self.idx, self.inv = bd._prepare_subsets(self.A)
        self.dim = K.dim
        self.slack = bd.TOL.facet_slack * max(1.0, float(np.max(np.abs(self.b0))))

    def _value_one(self, b):
        cand = np.einsum("kij,kj->ki", self.inv, b[self.idx])
        feas = np.all(cand @ self.A.T <= b + self.slack, axis=1)
        pts = cand[feas]
        if len(pts) < self.dim + 1:
            return 0.0
        try:
            return bd._hull_volume(pts, self.dim)
        except bd.DegenerateBody:
            return 0.0

    def value_batch(self, X):
        X = np.atleast_2d(X)
        B = self.b0[None, :] - X @ self.CX.T
        return np.array([self._value_one(b) for b in B])

    def mc_se(self, values):
        return np.zeros_like(values)


class _BallPolyMC:
    """Mixed ball/polytope pair via seeded Monte Carlo with frozen samples.

    Freezing the sample cloud makes the estimate deterministic and keeps
    the noise common across query points, so level-set bisection stays
    monotone in practice.
    """

    exact = False

    def __init__(self, K, L, seed=_MC_SEED, samples=_MC_SAMPLES):
        if isinstance(K, bd.Ball):
            lo = K.center - K.radius
            hi = K.center + K.radius
        else:
            lo = K.vertices.min(axis=0)
            hi = K.vertices.max(axis=0)
        rng = np.random.default_rng(seed)
        pts = rng.uniform(lo, hi, size=(samples, K.dim))
        keep = bd.contains_batch(K, pts, tol=0.0)
        self.pts = pts[keep]
        self.box_vol = float(np.prod(hi - lo))
        self.samples = samples
        self.L = L
        if isinstance(L, bd.Ball):
            # x - p in L  iff  |x - q| <= r with q = p + center
            self._q = self.pts + L.center
            self._qq = np.einsum("ij,ij->i", self._q, self._q)
            self._r2 = L.radius ** 2
        else:
            # x - p in L  iff  A x - b <= A p facetwise
            self._G = np.ascontiguousarray(self.pts @ L.A.T)

    def value_batch(self, X):
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if isinstance(self.L, bd.Ball):
            counts = np.empty(len(X), dtype=np.int64)
            block = 64
            for i in range(0, len(X), block):
                xb = X[i:i + block]
                d2 = (np.einsum("ij,ij->i", xb, xb)[:, None]
                      - 2.0 * xb @ self._q.T + self._qq[None, :])
                counts[i:i + block] = np.count_nonzero(d2 <= self._r2, axis=1)
        else:
            C = np.ascontiguousarray(X @ self.L.A.T - self.L.b)
            if _kernels.HAVE_NUMBA:
                counts = _kernels.count_ge_rows(self._G, C)
            else:
                counts = _kernels.count_ge_rows_numpy(self._G, C)
        return self.box_vol * counts / self.samples

    def mc_se(self, values):
        p = np.clip(values / self.box_vol, 0.0, 1.0)
        se = self.box_vol * np.sqrt(p * (1.0 - p) / self.samples)
        return np.maximum(se, 3.0 * self.box_vol / self.samples)


def _evaluator_for(K, L):
    if K.dim != L.dim:
        raise bd.DimensionMismatch("bodies live in different dimensions")
    k_ball = isinstance(K, bd.Ball)
    l_ball = isinstance(L, bd.Ball)
    if k_ball and l_ball:
        return _BallPair(K, L)
    if not k_ball and not l_ball:
        boxK, boxL = K.as_box(), L.as_box()
        if boxK is not None and boxL is not None:
            return _BoxPair(boxK, boxL)
        if K.dim == 2:
            return _PolyPair2D(K, L)
        return _PolyPairND(K, L)
    return _BallPolyMC(K, L)


@functools.lru_cache(maxsize=64)
def _cached_evaluator(K, L):
    return _evaluator_for(K, L)


def intersection_volume(K, L, x):
    """f(x) = |K cap (x - L)|."""
    x = np.asarray(x, dtype=float)
    if x.shape != (K.dim,):
        raise bd.DimensionMismatch("point dimension does not match bodies")
    return float(_cached_evaluator(K, L).value_batch(x[None])[0])


def intersection_volume_batch(K, L, X):
    return _cached_evaluator(K, L).value_batch(np.asarray(X, dtype=float))


# -- maximization and normalization ---------------------------------------


def _sum_interior(bodies):
    return np.sum([b.interior_point() for b in bodies], axis=0)


def _sum_diameter(bodies):
    return float(sum(b.diameter() for b in bodies))


def _multistart_max(value_batch, dim, center, diam, power, maxstarts=8):
    """Nelder-Mead ascent of value^power from deterministic starts."""

    def neg(x):
        v = float(value_batch(x[None])[0])
        return -(v ** power) if v > 0.0 else 0.0

    starts = [center]
    for i in range(dim):
        for sign in (1.0, -1.0):
            s = center.copy()
            s[i] += sign * 0.25 * diam
            starts.append(s)
    starts = starts[:maxstarts]
    fscale = max(abs(neg(center)), 1e-12 * diam)
    best_x, best_v = None, np.inf
    for s in starts:
        res = minimize(neg, s, method="Nelder-Mead",
                       options={"xatol": 1e-8 * diam,
                                "fatol": 1e-11 * fscale,
                                "maxiter": 400 * max(dim, 1),
                                "maxfev": 800 * max(dim, 1)})
        if res.fun < best_v:
            best_v = res.fun
            best_x = res.x
    return np.asarray(best_x, dtype=float)


def max_intersection(K, L):
    """Maximum overlap M(K, L) = sup_x f(x) and a maximizing point.

    When K is the reflection of L, or both bodies are origin-symmetric,
    the maximum sits at the origin and no search is needed.
    """
    ev = _evaluator_for(K, L)
    n = K.dim
    if bd.bodies_equal(K, bd.reflect(L)) or (bd.is_symmetric(K) and bd.is_symmetric(L)):
        x0 = np.zeros(n)
        return float(ev.value_batch(x0[None])[0]), x0
    center = _sum_interior([K, L])
    diam = _sum_diameter([K, L])
    xs = _multistart_max(ev.value_batch, n, center, diam, 1.0 / n)
    return float(ev.value_batch(xs[None])[0]), xs


@dataclass(frozen=True)
class NormalizedPair:
    """A pair whose overlap function peaks at the origin.

    max_overlap is f(0) after the normalizing translation of K;
    maximizer_residual is where a restarted search drifts from the origin,
    a direct measure of optimizer convergence.
    """

    K: object
    L: object
    max_overlap: float
    maximizer_residual: np.ndarray

    @property
    def dim(self):
        return self.K.dim

    @property
    def root_degree(self):
        """Power p with f^(1/p) concave on its support."""
        return self.K.dim

    def evaluator(self):
        return _cached_evaluator(self.K, self.L)

    def value_batch(self, X):
        return self.evaluator().value_batch(X)

    def support_sum(self, U):
        return bd.support_batch(self.K, U) + bd.support_batch(self.L, U)

    def diameter(self):
        return _sum_diameter([self.K, self.L])


def normalize(K, L):
    """Translate K so the overlap with the reflected L is maximal at 0."""
    n = K.dim
    shortcut = bd.bodies_equal(K, bd.reflect(L)) or (
        bd.is_symmetric(K) and bd.is_symmetric(L))
    if shortcut:
        f0 = float(_cached_evaluator(K, L).value_batch(np.zeros((1, n)))[0])
        if f0 < MIN_MAX_OVERLAP:
            raise bd.DegenerateBody("maximum overlap is numerically zero")
        return NormalizedPair(K, L, f0, np.zeros(n))
    m_opt, xs = max_intersection(K, L)
    if m_opt < MIN_MAX_OVERLAP:
        raise bd.DegenerateBody("maximum overlap is numerically zero")
    K2 = bd.translate(K, -xs)
    ev2 = _cached_evaluator(K2, L)
    f0 = float(ev2.value_batch(np.zeros((1, n)))[0])
    diam = _sum_diameter([K2, L])

    def neg(x):
        v = float(ev2.value_batch(x[None])[0])
        return -(v ** (1.0 / n)) if v > 0.0 else 0.0

    res = minimize(neg, np.zeros(n), method="Nelder-Mead",
                   options={"xatol": 1e-9 * diam, "fatol": 1e-12 * abs(neg(np.zeros(n))) + 1e-300,
                            "maxiter": 400 * n})
    residual = np.asarray(res.x, dtype=float)
    f_res = float(ev2.value_batch(residual[None])[0])
    if f0 < (1.0 - 1e-7) * max(m_opt, f_res):
        raise bd.ConvergenceError("overlap maximizer did not converge")
    return NormalizedPair(K2, L, f0, residual)


def directional_derivative(pair, u):
    """One-sided derivative of the overlap along u at the origin (<= 0)."""
    u = np.asarray(u, dtype=float)
    nu = float(np.linalg.norm(u))
    if nu <= 0.0:
        raise bd.DegenerateBody("direction must be nonzero")
    return float(derivative_batch(pair, (u / nu)[None])[0])


def derivative_batch(pair, U):
    """Forward differences with one Richardson halving, clamped to <= 0."""
    U = np.asarray(U, dtype=float)
    h = 1e-3 * pair.support_sum(U)
    f0 = pair.max_overlap
    f1 = pair.value_batch(U * h[:, None])
    f2 = pair.value_batch(U * (0.5 * h)[:, None])
    d1 = (f1 - f0) / h
    d2 = (f2 - f0) / (0.5 * h)
    return np.minimum(2.0 * d2 - d1, 0.0)


# -- m-fold overlap --------------------------------------------------------


class _TupleEval:
    """Volume of the lifted overlap polytope of an m-tuple at query points.

    Coordinates are the intermediate partial sums t_1, ..., t_{m-1}; the
    constraints say t_1 lies in the first body, consecutive differences lie
    in the middle bodies, and x - t_{m-1} lies in the last one.
    """

    exact = True

    def __init__(self, bodies):
        n = bodies[0].dim
        m = len(bodies)
        q = (m - 1) * n
        rows_A = []
        rows_b = []
        for j, body in enumerate(bodies):
            F = body.A.shape[0]
            blk = np.zeros((F, q))
            if j == 0:
                blk[:, 0:n] = body.A
            elif j < m - 1:
                blk[:, j * n:(j + 1) * n] = body.A
                blk[:, (j - 1) * n:j * n] = -body.A
            else:
                blk[:, (m - 2) * n:(m - 1) * n] = -body.A
            rows_A.append(blk)
            rows_b.append(body.b)
        self.A = np.vstack(rows_A)
        self.b0 = np.concatenate(rows_b)
        self.CX = np.zeros((len(self.b0), n))
        nF = bodies[-1].A.shape[0]
        self.CX[-nF:] = bodies[-1].A
        self.q = q
        self.slack = bd.TOL.facet_slack * max(1.0, float(np.max(np.abs(self.b0))))
        if q == 2:
            lo = np.zeros(2)
            hi = np.zeros(2)
            acc_lo = np.zeros(n)
            acc_hi = np.zeros(n)
            for j in range(m - 1):
                vb = bodies[j]
                vlo = (vb.center - vb.radius if isinstance(vb, bd.Ball)
                       else vb.vertices.min(axis=0))
                vhi = (vb.center + vb.radius if isinstance(vb, bd.Ball)
                       else vb.vertices.max(axis=0))
                acc_lo = acc_lo + vlo
                acc_hi = acc_hi + vhi
                if n == 1:
                    lo[j] = acc_lo[0]
                    hi[j] = acc_hi[0]
                else:
                    lo, hi = acc_lo, acc_hi
            pad = 1.0 + 0.01 * float(np.max(hi - lo))
            self.subj = np.ascontiguousarray([
                [lo[0] - pad, lo[1] - pad], [hi[0] + pad, lo[1] - pad],
                [hi[0] + pad, hi[1] + pad], [lo[0] - pad, hi[1] + pad]])
        elif q >= 3:
            self.idx, self.inv = bd._prepare_subsets(self.A)

    def value_batch(self, X):
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if self.q == 1:
            return interval_length_param(self.A, self.b0, self.CX, X)
        if self.q == 2:
            return clip_area_param(self.subj, np.ascontiguousarray(self.A),
                                   np.ascontiguousarray(self.b0),
                                   np.ascontiguousarray(self.CX),
                                   np.ascontiguousarray(X))
        B = self.b0[None, :] - X @ self.CX.T
        out = np.empty(len(X))
        for i, b in enumerate(B):
            cand = np.einsum("kij,kj->ki", self.inv, b[self.idx])
            feas = np.all(cand @ self.A.T <= b + self.slack, axis=1)
            pts = cand[feas]
            if len(pts) < self.q + 1:
                out[i] = 0.0
                continue
            try:
                out[i] = bd._hull_volume(pts, self.q)
            except bd.DegenerateBody:
                out[i] = 0.0
        return out

    def mc_se(self, values):
        return np.zeros_like(values)


def _validate_tuple(bodies):
    bodies = tuple(bodies)
    m = len(bodies)
    if m < 2:
        raise bd.DimensionMismatch("need at least two bodies")
    n = bodies[0].dim
    for b in bodies:
        if b.dim != n:
            raise bd.DimensionMismatch("all bodies must share a dimension")
    has_ball = any(isinstance(b, bd.Ball) for b in bodies)
    if has_ball and m >= 3:
        raise bd.UnsupportedRepresentation("balls only enter two-fold overlaps")
    if (m - 1) * n > 6:
        raise bd.ResourceLimit("lifted overlap polytope dimension exceeds 6")
    return bodies, m, n, has_ball


@functools.lru_cache(maxsize=32)
def _cached_tuple_eval(bodies):
    return _TupleEval(bodies)


def _tuple_evaluator(bodies):
    bodies, m, n, has_ball = _validate_tuple(bodies)
    if has_ball:
        K, L = bodies
        return _cached_evaluator(K, L)
    return _cached_tuple_eval(bodies)


def mfold_value(bodies, x):
    """m-fold convolution of the body indicators, evaluated at x."""
    bodies = tuple(bodies)
    x = np.asarray(x, dtype=float)
    if x.shape != (bodies[0].dim,):
        raise bd.DimensionMismatch("point dimension does not match bodies")
    return float(_tuple_evaluator(bodies).value_batch(x[None])[0])


def mfold_value_batch(bodies, X):
    return _tuple_evaluator(tuple(bodies)).value_batch(np.asarray(X, dtype=float))


@dataclass(frozen=True)
class NormalizedTuple:
    """An m-tuple whose m-fold convolution peaks at the origin."""

    bodies: tuple
    max_overlap: float
    maximizer_residual: np.ndarray

    @property
    def dim(self):
        return self.bodies[0].dim

    @property
    def m(self):
        return len(self.bodies)

    @property
    def lifted_dim(self):
        return (self.m - 1) * self.dim

    @property
    def root_degree(self):
        return self.lifted_dim

    def evaluator(self):
        return _tuple_evaluator(self.bodies)

    def value_batch(self, X):
        return self.evaluator().value_batch(X)

    def support_sum(self, U):
        return np.sum([bd.support_batch(b, U) for b in self.bodies], axis=0)

    def diameter(self):
        return _sum_diameter(self.bodies)


def mfold_normalize(bodies):
    """Translate the first body so the m-fold convolution peaks at 0."""
    bodies, m, n, has_ball = _validate_tuple(bodies)
    ev = _tuple_evaluator(bodies)
    q = (m - 1) * n
    if all(bd.is_symmetric(b) for b in bodies):
        f0 = float(ev.value_batch(np.zeros((1, n)))[0])
        if f0 < MIN_MAX_OVERLAP:
            raise bd.DegenerateBody("maximum overlap is numerically zero")
        return NormalizedTuple(bodies, f0, np.zeros(n))
    center = _sum_interior(bodies)
    diam = _sum_diameter(bodies)
    xs = _multistart_max(ev.value_batch, n, center, diam, 1.0 / q)
    m_opt = float(ev.value_batch(xs[None])[0])
    if m_opt < MIN_MAX_OVERLAP:
        raise bd.DegenerateBody("maximum overlap is numerically zero")
    shifted = (bd.translate(bodies[0], -xs),) + bodies[1:]
    ev2 = _tuple_evaluator(shifted)
    f0 = float(ev2.value_batch(np.zeros((1, n)))[0])

    def neg(x):
        v = float(ev2.value_batch(x[None])[0])
        return -(v ** (1.0 / q)) if v > 0.0 else 0.0

    res = minimize(neg, np.zeros(n), method="Nelder-Mead",
                   options={"xatol": 1e-9 * diam,
                            "fatol": 1e-12 * abs(neg(np.zeros(n))) + 1e-300,
                            "maxiter": 400 * n})
    residual = np.asarray(res.x, dtype=float)
    f_res = float(ev2.value_batch(residual[None])[0])
    if f0 < (1.0 - 1e-7) * max(m_opt, f_res):
        raise bd.ConvergenceError("m-fold maximizer did not converge")
    return NormalizedTuple(shifted, f0, residual)


def mfold_derivative_batch(tup, U):
    """One-sided derivative of the m-fold convolution at 0, clamped <= 0."""
    U = np.asarray(U, dtype=float)
    h = 1e-3 * tup.support_sum(U)
    f0 = tup.max_overlap
    f1 = tup.value_batch(U * h[:, None])
    f2 = tup.value_batch(U * (0.5 * h)[:, None])
    d1 = (f1 - f0) / h
    d2 = (f2 - f0) / (0.5 * h)
    return np.minimum(2.0 * d2 - d1, 0.0)
