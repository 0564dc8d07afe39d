"""Closed-form reference values and a generic Monte-Carlo volume oracle.

The three classical body families (cubes, balls, simplex pairs) admit exact
formulas for the normalized size of their theta-convolution bodies.  They are
implemented here independently of the geometric pipeline so the pipeline can
be validated against them.
"""

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "OracleResult",
    "unit_ball_volume",
    "sphere_surface_area",
    "cube_quotient",
    "ball_R",
    "simplex_quotient",
    "mc_volume",
    "bspline3_value",
    "bspline3_levelset",
]


@dataclass(frozen=True)
class OracleResult:
    """A reference value together with how it was obtained."""

    value: float
    method: str
    error_estimate: float


def unit_ball_volume(n):
    """Volume of the n-dimensional Euclidean unit ball."""
    if n < 0:
        raise ValueError("dimension must be nonnegative")
    return math.pi ** (n / 2.0) / math.gamma(n / 2.0 + 1.0)


def sphere_surface_area(n):
    """Surface measure of the unit sphere in R^n (boundary of the unit ball)."""
    if n < 1:
        raise ValueError("dimension must be at least 1")
    if n == 1:
        # two points, counting measure
        return 2.0
    return n * unit_ball_volume(n)


def cube_quotient(n, theta):
    """Normalized size of the theta-convolution body of two equal cubes.

    Returns |K +_theta K|^(1/n) / (2 |K|^(1/n)) for K a cube, which equals
    [1 - theta * sum_{k=0}^{n-1} (-log theta)^k / k!]^(1/n).  The value is 1
    at theta = 0 and decreases to 0 at theta = 1.
    """
    if n < 1:
        raise ValueError("dimension must be at least 1")
    if not 0.0 <= theta <= 1.0:
        raise ValueError("theta must lie in [0, 1]")
    if theta == 0.0:
        return 1.0
    if theta == 1.0:
        return 0.0
    u = -math.log(theta)
    term = 1.0
    acc = 1.0
    for k in range(1, n):
        term *= u / k
        acc += term
    inner = 1.0 - theta * acc
    # roundoff can push the tail slightly negative
    if inner < 0.0:
        inner = 0.0
    return inner ** (1.0 / n)


def _cap_integral(r_lo, r_hi, n, tol=1e-12, nodes=64):
    """integral of (1-s^2)^((n-1)/2) over [r_lo, r_hi] by split Gauss-Legendre."""
    x, w = np.polynomial.legendre.leggauss(nodes)

    def gl(a, b):
        mid = 0.5 * (a + b)
        half = 0.5 * (b - a)
        s = mid + half * x
        return half * float(np.sum(w * (1.0 - s * s) ** ((n - 1) / 2.0)))

    def refine(a, b, whole, depth):
        m = 0.5 * (a + b)
        left = gl(a, m)
        right = gl(m, b)
        if abs(left + right - whole) < tol or depth > 30:
            return left + right
        return refine(a, m, left, depth + 1) + refine(m, b, right, depth + 1)

    if r_hi <= r_lo:
        return 0.0
    return refine(r_lo, r_hi, gl(r_lo, r_hi), 0)


def ball_R(n, theta):
    """Normalized size of the theta-convolution body of two equal balls.

    Returns the R in [0, 1] solving
        2 * omega_{n-1} * integral_R^1 (1 - s^2)^((n-1)/2) ds = theta * omega_n,
    where omega_k is the unit-ball volume in R^k.  For two unit balls the
    theta-convolution body is the ball of radius 2 R.
    """
    if n < 1:
        raise ValueError("dimension must be at least 1")
    if not 0.0 <= theta <= 1.0:
        raise ValueError("theta must lie in [0, 1]")
    if theta == 0.0:
        return 1.0
    if theta == 1.0:
        return 0.0
    target = theta * unit_ball_volume(n) / (2.0 * unit_ball_volume(n - 1))
    lo, hi = 0.0, 1.0
    # integral_R^1 decreases in R, so bisect on R
    while hi - lo > 1e-10:
        mid = 0.5 * (lo + hi)
        if _cap_integral(mid, 1.0, n) > target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def simplex_quotient(n, theta):
    """Normalized size of the theta-convolution body of a simplex pair.

    For K a simplex and L = -K the theta-convolution body is the scaled
    difference body (1 - theta^(1/n)) (K - K), so the quotient
    |K +_theta L|^(1/n) / (2 |K|^(1/n)) equals
    (1 - theta^(1/n)) * binom(2n, n)^(1/n) / 2.
    """
    if n < 1:
        raise ValueError("dimension must be at least 1")
    if not 0.0 <= theta <= 1.0:
        raise ValueError("theta must lie in [0, 1]")
    return (1.0 - theta ** (1.0 / n)) * math.comb(2 * n, n) ** (1.0 / n) / 2.0


def mc_volume(membership, bounding_box, samples=200_000, seed=0):
    """Monte-Carlo volume of a set given by a membership predicate.

    membership takes an (N, n) array of points and returns a boolean array.
    bounding_box is a pair (lo, hi) of length-n arrays.  The result carries
    one standard error of the hit-fraction estimator; when no sample hits,
    the value is zero and the error field holds a coarse upper bound.
    """
    lo = np.asarray(bounding_box[0], dtype=float)
    hi = np.asarray(bounding_box[1], dtype=float)
    if lo.shape != hi.shape or lo.ndim != 1:
        raise ValueError("bounding box must be a pair of equal-length vectors")
    if np.any(hi <= lo):
        raise ValueError("bounding box must have positive extent")
    if samples < 1:
        raise ValueError("need at least one sample")
    rng = np.random.default_rng(seed)
    pts = rng.uniform(lo, hi, size=(samples, lo.size))
    hits = int(np.count_nonzero(membership(pts)))
    box_vol = float(np.prod(hi - lo))
    p = hits / samples
    if hits == 0:
        return OracleResult(0.0, "mc[zero-hits]", 3.0 * box_vol / samples)
    err = box_vol * math.sqrt(p * (1.0 - p) / samples)
    return OracleResult(box_vol * p, "mc", err)


def bspline3_value(x):
    """Convolution of three unit-interval indicators, evaluated at x.

    Piecewise quadratic supported on [0, 3] with maximum 3/4 at x = 3/2.
    """
    x = float(x)
    if x <= 0.0 or x >= 3.0:
        return 0.0
    if x <= 1.0:
        return 0.5 * x * x
    if x <= 2.0:
        return -x * x + 3.0 * x - 1.5
    return 0.5 * (3.0 - x) ** 2


def bspline3_levelset(theta):
    """Endpoints of {x : bspline3_value(x) >= theta * 3/4} for theta in [0, 1]."""
    if not 0.0 <= theta <= 1.0:
        raise ValueError("theta must lie in [0, 1]")
    if theta == 0.0:
        return (0.0, 3.0)
    level = 0.75 * theta
    if level <= 0.5:
        a = math.sqrt(2.0 * level)
    else:
        # crossing lies on the middle quadratic piece
        a = 0.5 * (3.0 - math.sqrt(3.0 - 3.0 * theta))
    return (a, 3.0 - a)
