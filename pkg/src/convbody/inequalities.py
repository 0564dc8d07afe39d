"""Numerical verification of overlap-body inequalities and identities.

Every check returns InequalityReport records oriented so the claim is
lhs >= rhs; equality checks use slack = -|lhs - rhs| and say so in notes.
Tolerances are error budgets assembled from quadrature estimates, bisection
slack, difference-quotient grade, and sampling noise, never from the size
of the gap being tested.
"""

import json
import math

from dataclasses import dataclass, asdict

import numpy as np

from . import bodies as bd
from . import convolution as cv
from . import projbody as pb
from . import thetabody as tb


@dataclass(frozen=True)
class InequalityReport:
    """One verified claim: lhs >= rhs within tol, plus bookkeeping."""

    name: str
    inputs: str
    n: int
    theta: object
    lhs: float
    rhs: float
    slack: float
    tightness: float
    tol: float
    passed: bool
    seed: object = None
    notes: str = ""


_CSV_FIELDS = ["name", "inputs", "n", "theta", "lhs", "rhs", "slack",
               "tightness", "tol", "passed", "seed", "notes"]


def reports_to_csv(reports):
    lines = [",".join(_CSV_FIELDS)]
    for r in reports:
        row = asdict(r)
        cells = []
        for key in _CSV_FIELDS:
            v = row[key]
            if isinstance(v, float):
                cells.append(repr(v))
            elif v is None:
                cells.append("")
            else:
                s = str(v)
                if "," in s or '"' in s:
                    s = '"' + s.replace('"', '""') + '"'
                cells.append(s)
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def reports_to_json(reports):
    return json.dumps([asdict(r) for r in reports], indent=2,
                      default=float) + "\n"


def all_passed(reports):
    return all(r.passed for r in reports)


def _tightness(lhs, rhs):
    if not math.isfinite(lhs):
        return math.inf
    if abs(rhs) > 1e-300:
        return lhs / rhs
    return 1.0 if abs(lhs) <= 1e-300 else math.inf


def _report(name, inputs, n, theta, lhs, rhs, tol, seed=None, notes="",
            two_sided=False):
    lhs = float(lhs)
    rhs = float(rhs)
    if two_sided:
        slack = -abs(lhs - rhs)
        passed = abs(lhs - rhs) <= tol
    else:
        slack = lhs - rhs
        passed = slack >= -tol
    return InequalityReport(name, inputs, int(n),
                            None if theta is None else float(theta),
                            lhs, rhs, float(slack), _tightness(lhs, rhs),
                            float(tol), bool(passed), seed, notes)


def _body_label(body):
    if isinstance(body, bd.Ball):
        return "ball(r=%.4g)" % body.radius
    return "poly(%dv)" % len(body.vertices)


def _pair_label(pair):
    return "%s|%s" % (_body_label(pair.K), _body_label(pair.L))


def _tuple_label(tup):
    return "|".join(_body_label(b) for b in tup.bodies)


def _scaled(body, factor):
    return bd.apply(bd.scaling(body.dim, factor), body)


# -- error budgets -----------------------------------------------------------


def _volume_budget(rb, source, rtol):
    """Volume of a level-set radial body plus an error bound.

    The bound collects the grid quadrature estimate, the bisection slack
    rtol * (support radius) pushed through the volume integrand, and three
    standard errors of the overlap values when the evaluator samples.
    """
    v, quad = tb.radial_volume_with_error(rb)
    n = rb.dim
    U = rb.grid.directions
    sup = np.maximum(source.support_sum(U), 0.0)
    bis = float(rb.grid.weights @ (rb.radii ** (n - 1) * (rtol * sup)))
    mc = 0.0
    ev = source.evaluator()
    if not ev.exact:
        se = float(np.max(ev.mc_se(np.array([source.max_overlap]))))
        mc = 3.0 * se / source.max_overlap * v
    return v, quad + bis + mc


def _root_tol(v, err, n, rhs):
    """Budget for v ** (1/n) given a budget for v, plus an absolute floor."""
    if v > 0.0:
        d = err * v ** (1.0 / n) / (n * v)
    else:
        d = err ** (1.0 / n)
    return d + 1e-9 * (1.0 + abs(rhs))


def _radial_body(grid, radii, theta=None):
    radii = np.asarray(radii, dtype=float)
    return tb.RadialBody(grid, radii, np.zeros(len(radii), dtype=bool),
                         np.zeros(grid.dim), theta)


def _ball_radial(center, radius, U):
    # positive root of |t u - c| = R per unit direction u; needs |c| < R
    uc = U @ center
    disc = uc * uc + radius * radius - float(center @ center)
    if np.any(disc <= 0.0):
        raise bd.OriginNotInterior("origin is not inside the ball")
    return uc + np.sqrt(disc)


def _radial_of_sum(pair, grid, rtol):
    """Per-direction radius of K + L, exactly when the shapes allow it."""
    K, L = pair.K, pair.L
    U = grid.directions
    k_ball = isinstance(K, bd.Ball)
    l_ball = isinstance(L, bd.Ball)
    if not k_ball and not l_ball:
        return bd.radial_of_polytope(bd.minkowski_sum(K, L), U), "exact"
    if k_ball and l_ball:
        return _ball_radial(K.center + L.center, K.radius + L.radius, U), "exact"
    r = tb.theta_radii_matrix(pair, [0.0], grid, rtol)[:, 0]
    return r, "level-set"


def _sum_volume(pair_or_tup, bodies, grid, rtol):
    """Volume of the Minkowski sum of the bodies, with an error budget."""
    balls = [b for b in bodies if isinstance(b, bd.Ball)]
    if not balls:
        total = bodies[0]
        for nxt in bodies[1:]:
            total = bd.minkowski_sum(total, nxt)
        return bd.volume(total), 0.0, "exact"
    if len(balls) == len(bodies):
        r = sum(b.radius for b in balls)
        return bd.volume(bd.Ball(np.zeros(bodies[0].dim), r)), 0.0, "exact"
    radii = tb.theta_radii_matrix(pair_or_tup, [0.0], grid, rtol)[:, 0]
    rb = _radial_body(grid, radii, 0.0)
    v, err = _volume_budget(rb, pair_or_tup, rtol)
    return v, err, "level-set"


# -- single inequalities -----------------------------------------------------


def check_bm_theta(pair, theta, grid=None, rtol=1e-8, seed=None, label=""):
    """|level body| ** (1/n) >= (1 - theta ** (1/n)) (|K|^(1/n) + |L|^(1/n))."""
    n = pair.dim
    grid = tb.SphereGrid.make(n) if grid is None else grid
    rb = tb.theta_body(pair, theta, grid, rtol)
    v, err = _volume_budget(rb, pair, rtol)
    lhs = v ** (1.0 / n)
    rhs = (1.0 - theta ** (1.0 / n)) * (
        bd.volume(pair.K) ** (1.0 / n) + bd.volume(pair.L) ** (1.0 / n))
    tol = _root_tol(v, err, n, rhs)
    return _report("bm-theta", label or _pair_label(pair), n, theta,
                   lhs, rhs, tol, seed)


def check_equivalent_forms(K, L, theta, lam=0.5, grid=None, rtol=1e-8,
                           seed=None):
    """Five equivalent shapes of the lower volume bound, checked side by side.

    Each report notes its tightness rescaled to the volume scale so the five
    numbers can be compared directly; for an exact-equality pair they agree.
    """
    if not 0.0 < lam < 1.0:
        raise ValueError("lambda must lie strictly between 0 and 1")
    n = K.dim
    grid = tb.SphereGrid.make(n) if grid is None else grid
    phi = (1.0 - theta ** (1.0 / n)) ** n
    vk, vl = bd.volume(K), bd.volume(L)
    out = []

    def vol_of(Ka, La):
        pair = cv.normalize(Ka, La)
        rb = tb.theta_body(pair, theta, grid, rtol)
        return _volume_budget(rb, pair, rtol)

    v1, e1 = vol_of(K, L)
    rhs = phi ** (1.0 / n) * (vk ** (1.0 / n) + vl ** (1.0 / n))
    out.append(_report("bm-theta-sum", "%s|%s" % (_body_label(K), _body_label(L)),
                       n, theta, v1 ** (1.0 / n), rhs,
                       _root_tol(v1, e1, n, rhs), seed,
                       notes="volume-scale tightness %.6f"
                       % _tightness(v1, rhs ** n)))

    v2, e2 = vol_of(_scaled(K, lam), _scaled(L, 1.0 - lam))
    inputs2 = "lam=%.3g split" % lam
    rhs = phi ** (1.0 / n) * (lam * vk ** (1.0 / n) + (1.0 - lam) * vl ** (1.0 / n))
    out.append(_report("bm-theta-split", inputs2, n, theta,
                       v2 ** (1.0 / n), rhs, _root_tol(v2, e2, n, rhs), seed,
                       notes="volume-scale tightness %.6f"
                       % _tightness(v2, rhs ** n)))

    rhs = phi * vk ** lam * vl ** (1.0 - lam)
    out.append(_report("bm-theta-geometric", inputs2, n, theta, v2, rhs,
                       e2 + 1e-9 * (1.0 + rhs), seed,
                       notes="volume-scale tightness %.6f" % _tightness(v2, rhs)))

    rhs = phi * min(vk, vl)
    out.append(_report("bm-theta-min", inputs2, n, theta, v2, rhs,
                       e2 + 1e-9 * (1.0 + rhs), seed,
                       notes="volume-scale tightness %.6f" % _tightness(v2, rhs)))

    Kb = _scaled(K, vk ** (-1.0 / n))
    Lb = _scaled(L, vl ** (-1.0 / n))
    v3, e3 = vol_of(_scaled(Kb, lam), _scaled(Lb, 1.0 - lam))
    out.append(_report("bm-theta-normalized", inputs2 + ", unit volumes",
                       n, theta, v3, phi, e3 + 1e-9 * (1.0 + phi), seed,
                       notes="volume-scale tightness %.6f" % _tightness(v3, phi)))
    return out


def check_monotonicity(pair, theta0, theta1, grid=None, rtol=1e-8, seed=None,
                       tol=None):
    """Scaled level bodies grow with theta: body(t0)/s(t0) inside body(t1)/s(t1).

    The scale is s(theta) = 1 - theta ** (1/p) with p the concavity degree.
    """
    if not 0.0 <= theta0 <= theta1 < 1.0:
        raise ValueError("need 0 <= theta0 <= theta1 < 1")
    n = pair.dim
    grid = tb.SphereGrid.make(n) if grid is None else grid
    p = 1.0 / pair.root_degree
    R = tb.theta_radii_matrix(pair, [theta0, theta1], grid, rtol)
    rb0 = _radial_body(grid, R[:, 0], theta0)
    rb1 = _radial_body(grid, R[:, 1], theta1)
    s0 = 1.0 - theta0 ** p
    s1 = 1.0 - theta1 ** p
    verdict = tb.scaled_radial_compare(rb0, s0, rb1, s1, tol=tol)
    w = verdict.worst_direction
    ratio = (R[w, 1] / s1) / max(R[w, 0] / s0, 1e-300)
    return _report("scaled-monotonicity", _pair_label(pair), n, theta0,
                   verdict.min_slack, 0.0, verdict.tol, seed,
                   notes="theta1=%g, worst direction %d, ratio %.6f"
                   % (theta1, w, ratio))


def _sample_in_body(body, count, rng):
    if isinstance(body, bd.Ball):
        g = rng.normal(size=(count, body.dim))
        g /= np.linalg.norm(g, axis=1)[:, None]
        t = rng.uniform(size=count) ** (1.0 / body.dim)
        return body.center + body.radius * t[:, None] * g
    lo = body.vertices.min(axis=0)
    hi = body.vertices.max(axis=0)
    out = np.empty((count, body.dim))
    have = 0
    for _ in range(1000):
        cand = rng.uniform(lo, hi, size=(4 * count, body.dim))
        keep = cand[bd.contains_batch(body, cand, tol=0.0)]
        take = min(count - have, len(keep))
        out[have:have + take] = keep[:take]
        have += take
        if have == count:
            return out
    raise bd.ConvergenceError("rejection sampling kept missing the body")


def check_inclusion_chain(pair, theta, grid=None, rtol=1e-8, samples=64,
                          seed=0, tol=None):
    """Four nested facts about one level body, reported separately.

    1. It contains (1 - theta) M times the hull of the two polar
       projection bodies.
    2. It contains (1 - theta ** (1/n)) (K + L).
    3. Along each direction, radius * |overlap slope at 0| stays below
       n (1 - theta ** (1/n)) M.
    4. Points a + b with a in K, b in L and |(1 - ||a||_K) K cap
       (1 - ||b||_L)(-L)| >= theta M land inside it.
    """
    n = pair.dim
    M = pair.max_overlap
    grid = tb.SphereGrid.make(n) if grid is None else grid
    label = _pair_label(pair)
    rb = tb.theta_body(pair, theta, grid, rtol)
    r_theta = rb.radii
    scale = float(np.max(r_theta))
    base_tol = 1e-6 * scale if tol is None else tol
    out = []

    hull = pb.hull_union(pb.polar_projection_body(pair.K, grid),
                         pb.polar_projection_body(pair.L, grid))
    low = (1.0 - theta) * M * hull.radii
    slack = r_theta - low
    w = int(np.argmin(slack))
    out.append(_report("chain-projection-lower", label, n, theta,
                       float(slack[w]), 0.0, base_tol, seed,
                       notes="worst direction %d, ratio %.6f"
                       % (w, r_theta[w] / max(low[w], 1e-300))))

    r_sum, how = _radial_of_sum(pair, grid, rtol)
    low = (1.0 - theta ** (1.0 / n)) * r_sum
    slack = r_theta - low
    w = int(np.argmin(slack))
    out.append(_report("chain-sum-lower", label, n, theta,
                       float(slack[w]), 0.0, base_tol, seed,
                       notes="sum radii %s, worst direction %d" % (how, w)))

    d = cv.derivative_batch(pair, grid.directions)
    cap = n * (1.0 - theta ** (1.0 / n)) * M
    slack = cap - r_theta * np.abs(d)
    w = int(np.argmin(slack))
    out.append(_report("chain-derivative-upper", label, n, theta,
                       float(slack[w]), 0.0,
                       1e-4 * cap if tol is None else tol, seed,
                       notes="worst direction %d" % w))

    out.append(_membership_report(pair, theta, samples, seed, label))
    return out


def _radial_generic(body, U):
    if isinstance(body, bd.Ball):
        return _ball_radial(body.center, body.radius, U)
    return bd.radial_of_polytope(body, U)


def _membership_report(pair, theta, samples, seed, label):
    n = pair.dim
    M = pair.max_overlap
    rng = np.random.default_rng(seed)
    ua = rng.normal(size=(samples, n))
    ua /= np.linalg.norm(ua, axis=1)[:, None]
    ub = rng.normal(size=(samples, n))
    ub /= np.linalg.norm(ub, axis=1)[:, None]
    try:
        ra = _radial_generic(pair.K, ua)
        rb_ = _radial_generic(pair.L, ub)
    except bd.OriginNotInterior:
        return _report("chain-membership", label, n, theta, math.inf, 0.0,
                       0.0, seed, notes="skipped: origin not interior")
    # gauge values are exact by construction and biased toward the center,
    # where the qualifying condition actually bites
    alphas = rng.uniform(size=samples) ** 2
    betas = rng.uniform(size=samples) ** 2
    A = alphas[:, None] * ra[:, None] * ua
    B = betas[:, None] * rb_[:, None] * ub
    worst = math.inf
    used = 0
    mc_tol = 0.0
    ev = pair.evaluator()
    for a, b, al, be in zip(A, B, alphas, betas):
        if 1.0 - al <= 1e-9 or 1.0 - be <= 1e-9:
            continue
        inner = cv.intersection_volume(_scaled(pair.K, 1.0 - al),
                                       _scaled(pair.L, 1.0 - be),
                                       np.zeros(n))
        if inner < theta * M:
            continue
        used += 1
        val = float(pair.value_batch((a + b)[None])[0])
        worst = min(worst, (val - theta * M) / M)
        if not ev.exact:
            mc_tol = max(mc_tol, 3.0 * float(ev.mc_se(np.array([val]))[0]) / M)
    notes = "%d of %d samples qualified" % (used, samples)
    return _report("chain-membership", label, n, theta, worst, 0.0,
                   1e-6 + mc_tol, seed, notes=notes)


def check_zhang_extension(pair, grid=None, theta_grid_size=64, rtol=1e-8,
                          seed=None):
    """Limit-body lower bound and the exact integral identity.

    The identity says the integral of the level-body volume over theta in
    [0, 1] equals |K| |L| / M; it is checked with a trapezoid rule refined
    geometrically toward theta = 1 where the integrand vanishes like
    (1 - theta) ** n.
    """
    n = pair.dim
    M = pair.max_overlap
    grid = tb.SphereGrid.make(n) if grid is None else grid
    label = _pair_label(pair)
    vk, vl = bd.volume(pair.K), bd.volume(pair.L)
    product = vk * vl / M
    out = []

    rhs = math.comb(2 * n, n) / n ** n * product
    limit = tb.limit_body(pair, grid)
    if limit.is_bounded():
        v1, quad = tb.radial_volume_with_error(limit)
        tol = quad + 1e-4 * v1 + 1e-9 * (1.0 + rhs)
        out.append(_report("zhang-limit-lower", label, n, None, v1, rhs, tol,
                           seed, notes=detect_equality_case(pair.K, pair.L)))
    else:
        out.append(_report("zhang-limit-lower", label, n, None, math.inf, rhs,
                           0.0, seed,
                           notes="limit body unbounded; bound holds trivially"))

    if theta_grid_size < 8:
        raise ValueError("theta grid too coarse for the identity check")
    h = 1.0 / (theta_grid_size - 1)
    nodes = list(np.linspace(0.0, 1.0, theta_grid_size)[:-1])
    t = 1.0 - 0.5 * h
    while 1.0 - t >= 1e-6:
        nodes.append(t)
        t = 1.0 - 0.5 * (1.0 - t)
    nodes = np.array(sorted(nodes))
    R = tb.theta_radii_matrix(pair, nodes, grid, rtol)
    powers = R ** n
    vols = (grid.weights @ powers) / n
    tail = (1.0 - nodes[-1]) * vols[-1] / 2.0
    integral = float(np.trapezoid(vols, nodes) + tail)
    coarse = float(np.trapezoid(vols[::2], nodes[::2])
                   + (1.0 - nodes[-1 if len(nodes) % 2 else -2]) * vols[::2][-1] / 2.0)
    step_err = abs(integral - coarse)
    if grid.kind == "seeded-random":
        surf = tb.sphere_surface_area(n)
        per_node = np.std(surf * powers / n, axis=1, ddof=1) / math.sqrt(grid.count)
        radial_err = float(np.trapezoid(per_node, nodes))
    else:
        vols_half = 2.0 * (grid.weights[::2] @ powers[::2]) / n
        radial_err = float(np.trapezoid(np.abs(vols - vols_half), nodes))
    tol = 2.0 * step_err + radial_err + 1e-9 * (1.0 + product)
    out.append(_report("fubini-identity", label, n, None, integral, product,
                       tol, seed, notes="equality; %d theta nodes" % len(nodes),
                       two_sided=True))
    return out


def check_rogers_shephard(pair, grid=None, rtol=1e-8, seed=None):
    """binom(2n, n) |K| |L| >= |K + L| M, sharp exactly for reflected simplices."""
    n = pair.dim
    grid = tb.SphereGrid.make(n) if grid is None else grid
    M = pair.max_overlap
    vk, vl = bd.volume(pair.K), bd.volume(pair.L)
    lhs = math.comb(2 * n, n) * vk * vl
    vsum, err, how = _sum_volume(pair, [pair.K, pair.L], grid, rtol)
    rhs = vsum * M
    mc = 0.0
    ev = pair.evaluator()
    if not ev.exact:
        mc = 3.0 * float(np.max(ev.mc_se(np.array([M])))) * vsum
    tol = M * err + mc + 1e-9 * (1.0 + lhs)
    notes = detect_equality_case(pair.K, pair.L)
    if how != "exact":
        notes += "; sum volume via level set"
    return _report("rogers-shephard-upper", _pair_label(pair), n, None,
                   lhs, rhs, tol, seed, notes=notes)


def check_mfold(bodies, theta, grid=None, rtol=1e-8, seed=None):
    """The m-fold analogues: lower volume bound, sum bounds, monotonicity."""
    tup = bodies if isinstance(bodies, cv.NormalizedTuple) else (
        cv.mfold_normalize(bodies))
    n = tup.dim
    q = tup.root_degree
    m = tup.m
    grid = tb.SphereGrid.make(n) if grid is None else grid
    label = _tuple_label(tup)
    M = tup.max_overlap
    vols = [bd.volume(b) for b in tup.bodies]
    out = []

    rb = tb.mfold_theta_body(tup, theta, grid, rtol)
    v, err = _volume_budget(rb, tup, rtol)
    rhs = (1.0 - theta ** (1.0 / q)) * sum(w ** (1.0 / n) for w in vols)
    out.append(_report("mfold-bm", label, n, theta, v ** (1.0 / n), rhs,
                       _root_tol(v, err, n, rhs), seed,
                       notes="m=%d, concavity degree %d" % (m, q)))

    bound = math.comb(m * n, n) * math.prod(vols) / M
    vsum, serr, how = _sum_volume(tup, list(tup.bodies), grid, rtol)
    notes = "m=%d" % m if how == "exact" else "m=%d; sum volume via level set" % m
    out.append(_report("mfold-sum-upper", label, n, None, bound, vsum,
                       serr + 1e-9 * (1.0 + bound), seed, notes=notes))

    limit = tb.mfold_limit_body(tup, grid)
    if limit.is_bounded():
        v1, quad = tb.radial_volume_with_error(limit)
        lhs = (m - 1) ** n * n ** n * v1
        tol = (m - 1) ** n * n ** n * (quad + 1e-4 * v1) + 1e-9 * (1.0 + bound)
        out.append(_report("mfold-limit-upper", label, n, None, lhs, bound,
                           tol, seed, notes="m=%d" % m))
    else:
        out.append(_report("mfold-limit-upper", label, n, None, math.inf,
                           bound, 0.0, seed,
                           notes="m=%d; limit body unbounded (smooth overlap),"
                           " bound holds trivially" % m))

    p = 1.0 / q
    R = tb.theta_radii_matrix(tup, [0.5 * theta, theta], grid, rtol)
    rb0 = _radial_body(grid, R[:, 0], 0.5 * theta)
    rb1 = _radial_body(grid, R[:, 1], theta)
    verdict = tb.scaled_radial_compare(rb0, 1.0 - (0.5 * theta) ** p,
                                       rb1, 1.0 - theta ** p)
    out.append(_report("mfold-monotone", label, n, 0.5 * theta,
                       verdict.min_slack, 0.0, verdict.tol, seed,
                       notes="theta1=%g, m=%d, worst direction %d"
                       % (theta, m, verdict.worst_direction)))
    return out


def detect_equality_case(K, L):
    """Classify a pair: 'simplex-pair', 'homothetic-simplices', or 'generic'.

    A simplex pair means -L is a translate of K and both are simplices, the
    sharpness case of the upper volume-product bound; homothetic means -L is
    a translate of a rescaled K.
    """
    if isinstance(K, bd.Ball) or isinstance(L, bd.Ball):
        return "generic"
    n = K.dim
    if len(K.vertices) != n + 1 or len(L.vertices) != n + 1:
        return "generic"
    vk, vl = bd.volume(K), bd.volume(L)
    lam = (vl / vk) ** (1.0 / n)
    Lr = bd.reflect(L)
    z = Lr.vertices.mean(axis=0) - lam * K.vertices.mean(axis=0)
    image = bd.apply(bd.AffineMap(lam * np.eye(n), z), K)
    if not bd.bodies_equal(image, Lr, tol=1e-7):
        return "generic"
    return "simplex-pair" if abs(lam - 1.0) <= 1e-7 else "homothetic-simplices"


# -- randomized battery ------------------------------------------------------


def _random_hull(n, rng):
    for _ in range(20):
        count = int(rng.integers(3 * n, 6 * n + 1))
        pts = rng.normal(size=(count, n))
        try:
            body = bd.VPolytope(pts)
        except bd.GeometryError:
            continue
        if bd.volume(body) > 1e-3:
            return body
    raise bd.DegenerateBody("random hull generation kept failing")


def _random_cut_cube(n, rng):
    for _ in range(20):
        s = float(rng.uniform(0.5, 1.5))
        A = np.vstack([np.eye(n), -np.eye(n)])
        b = np.full(2 * n, 0.5 * s)
        cuts = int(rng.integers(1, n + 2))
        g = rng.normal(size=(cuts, n))
        g /= np.linalg.norm(g, axis=1)[:, None]
        c = rng.uniform(0.1, 0.45, size=cuts) * s
        try:
            body = bd.HPolytope(np.vstack([A, g]), np.concatenate([b, c]))
        except bd.GeometryError:
            continue
        if bd.volume(body) > 1e-3:
            return body
    raise bd.DegenerateBody("random cut-cube generation kept failing")


def fuzz(n=2, count=20, seed=7, grid=None, thetas=(0.3, 0.7), rtol=1e-8,
         checks=("bm", "chain", "monotonicity", "rogers-shephard", "zhang")):
    """Run a battery of checks over randomly generated pairs.

    Pairs alternate between hulls of Gaussian clouds and randomly cut cubes.
    Generation is fully determined by the seed; each pair's child seed is
    recorded on its reports, and reports come back in construction order.
    """
    if count <= 0:
        raise ValueError("count must be positive")
    unknown = set(checks) - {"bm", "chain", "monotonicity",
                             "rogers-shephard", "zhang"}
    if unknown:
        raise ValueError("unknown checks: " + ", ".join(sorted(unknown)))
    grid = tb.SphereGrid.make(n) if grid is None else grid
    master = np.random.default_rng(seed)
    reports = []
    for i in range(count):
        child = int(master.integers(2 ** 31))
        rng = np.random.default_rng(child)
        gen = _random_hull if i % 2 == 0 else _random_cut_cube
        K = gen(n, rng)
        L = gen(n, rng)
        pair = cv.normalize(K, L)
        if "bm" in checks:
            for th in thetas:
                reports.append(check_bm_theta(pair, th, grid, rtol, seed=child))
        if "chain" in checks:
            reports.extend(check_inclusion_chain(pair, thetas[0], grid, rtol,
                                                 seed=child))
        if "monotonicity" in checks and len(thetas) >= 2:
            reports.append(check_monotonicity(pair, thetas[0], thetas[-1],
                                              grid, rtol, seed=child))
        if "rogers-shephard" in checks:
            reports.append(check_rogers_shephard(pair, grid, rtol, seed=child))
        if "zhang" in checks:
            rhs = math.comb(2 * n, n) / n ** n * bd.volume(pair.K) \
                * bd.volume(pair.L) / pair.max_overlap
            limit = tb.limit_body(pair, grid)
            if limit.is_bounded():
                v1, quad = tb.radial_volume_with_error(limit)
                reports.append(_report(
                    "zhang-limit-lower", _pair_label(pair), n, None, v1, rhs,
                    quad + 1e-4 * v1 + 1e-9 * (1.0 + rhs), seed=child,
                    notes=detect_equality_case(pair.K, pair.L)))
            else:
                reports.append(_report(
                    "zhang-limit-lower", _pair_label(pair), n, None, math.inf,
                    rhs, 0.0, seed=child,
                    notes="limit body unbounded; bound holds trivially"))
    return reports
