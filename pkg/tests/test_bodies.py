"""Polytope and ball primitives: representations, transforms, measures."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.spatial import ConvexHull

from convbody import bodies as bd
from convbody import oracles


def random_polytope(rng, n):
    return bd.VPolytope(rng.normal(size=(4 * n, n)))


def test_named_bodies_volumes():
    assert bd.volume(bd.cube(2)) == pytest.approx(1.0, rel=1e-12)
    assert bd.volume(bd.cube(3, 1.0)) == pytest.approx(8.0, rel=1e-12)
    assert bd.volume(bd.standard_simplex(3)) == pytest.approx(1 / 6, rel=1e-12)
    assert bd.volume(bd.cross_polytope(3)) == pytest.approx(8 / 6, rel=1e-12)
    assert bd.volume(bd.Ball(np.zeros(4), 1.0)) == pytest.approx(
        math.pi ** 2 / 2, rel=1e-12)


def test_hpolytope_vpolytope_agree_on_cube():
    hc = bd.cube(2, 0.5)
    vc = bd.VPolytope(np.array([[0.5, 0.5], [0.5, -0.5], [-0.5, 0.5],
                                [-0.5, -0.5]]))
    assert bd.bodies_equal(hc, vc)
    assert bd.volume(hc) == pytest.approx(bd.volume(vc), rel=1e-12)


def test_degenerate_inputs_rejected():
    with pytest.raises(bd.DegenerateBody):
        bd.VPolytope(np.array([[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]]))
    with pytest.raises(bd.UnboundedBody):
        bd.HPolytope(np.array([[1.0, 0.0], [0.0, 1.0]]), np.ones(2))
    with pytest.raises(bd.DegenerateBody):
        bd.Ball(np.zeros(2), 0.0)
    with pytest.raises(bd.ResourceLimit):
        bd.HPolytope(np.vstack([np.eye(2), -np.eye(2),
                                np.random.default_rng(0).normal(size=(70, 2))]),
                     np.ones(74))


def test_volume_scales_with_determinant():
    rng = np.random.default_rng(12)
    for n in (2, 3):
        for _ in range(8):
            P = random_polytope(rng, n)
            T = bd.AffineMap(rng.normal(size=(n, n)) + 2 * np.eye(n),
                             rng.normal(size=n))
            img = bd.apply(T, P)
            assert bd.volume(img) == pytest.approx(
                abs(T.det()) * bd.volume(P), rel=1e-9)


def test_support_additive_under_minkowski_sum():
    rng = np.random.default_rng(7)
    for n in (2, 3):
        P = random_polytope(rng, n)
        Q = random_polytope(rng, n)
        S = bd.minkowski_sum(P, Q)
        U = rng.normal(size=(40, n))
        got = bd.support_batch(S, U)
        want = bd.support_batch(P, U) + bd.support_batch(Q, U)
        assert np.allclose(got, want, rtol=1e-9, atol=1e-12)


@settings(max_examples=50, deadline=None)
@given(st.floats(min_value=0.0, max_value=50.0),
       st.lists(st.floats(min_value=-3, max_value=3), min_size=2, max_size=2))
def test_gauge_positively_homogeneous(t, x):
    body = bd.VPolytope(np.array([[1.2, 0.1], [-0.3, 1.1], [-1.0, -0.8],
                                  [0.9, -1.0]]))
    x = np.asarray(x)
    g1 = bd.gauge(body, t * x)
    g0 = bd.gauge(body, x)
    assert g1 == pytest.approx(t * g0, rel=1e-12, abs=1e-12)


def test_gauge_one_on_boundary_vertices():
    body = bd.cross_polytope(3)
    for v in body.vertices:
        assert bd.gauge(body, v) == pytest.approx(1.0, rel=1e-9)
    with pytest.raises(bd.OriginNotInterior):
        bd.gauge(bd.VPolytope(np.array([[1.0, 0.0], [2.0, 0.0], [1.0, 1.0]])),
                 np.array([1.5, 0.1]))


def test_volume_against_mc_oracle():
    rng = np.random.default_rng(99)
    for n in (2, 3):
        for _ in range(10):
            P = random_polytope(rng, n)
            lo = P.vertices.min(axis=0) - 0.01
            hi = P.vertices.max(axis=0) + 0.01
            res = oracles.mc_volume(lambda X: bd.contains_batch(P, X, tol=0.0),
                                    (lo, hi), samples=30000,
                                    seed=int(rng.integers(2 ** 31)))
            assert abs(res.value - bd.volume(P)) <= 3.0 * res.error_estimate


def _projected_hull_volume(body, u):
    # explicit construction: project vertices to the hyperplane u-perp
    n = body.dim
    u = u / np.linalg.norm(u)
    basis = np.linalg.qr(np.column_stack([u, np.eye(n)[:, :n - 1]]))[0][:, 1:]
    pts = body.vertices @ basis
    if n == 2:
        return float(pts.max() - pts.min())
    return ConvexHull(pts).volume


def test_projection_volume_matches_explicit_projection():
    rng = np.random.default_rng(21)
    for n in (2, 3, 4):
        P = random_polytope(rng, n)
        for _ in range(6):
            u = rng.normal(size=n)
            u /= np.linalg.norm(u)
            got = bd.projection_volume(P, u)
            want = _projected_hull_volume(P, u)
            assert got == pytest.approx(want, rel=1e-9)


def test_projection_volume_ball_and_interval():
    assert bd.projection_volume(bd.Ball(np.zeros(3), 2.0), np.array([0, 0, 1.0])) \
        == pytest.approx(math.pi * 4.0, rel=1e-12)
    seg = bd.VPolytope(np.array([[-1.0], [3.0]]))
    assert bd.projection_volume(seg, np.array([1.0])) == 1.0


def test_radial_of_polytope_unit_directions():
    sq = bd.cube(2, 0.5)
    u = np.array([[1.0, 0.0], [0.0, 1.0],
                  [math.sqrt(0.5), math.sqrt(0.5)]])
    r = bd.radial_of_polytope(sq, u)
    assert r[0] == pytest.approx(0.5, rel=1e-12)
    assert r[1] == pytest.approx(0.5, rel=1e-12)
    assert r[2] == pytest.approx(math.sqrt(0.5), rel=1e-12)


def test_reflect_translate_roundtrip():
    rng = np.random.default_rng(4)
    P = random_polytope(rng, 3)
    z = rng.normal(size=3)
    Q = bd.translate(bd.reflect(bd.reflect(P)), z)
    assert bd.bodies_equal(Q, bd.translate(P, z))


def test_intersect_and_contains():
    A = bd.cube(2, 0.5)
    B = bd.translate(bd.cube(2, 0.5), np.array([0.3, 0.0]))
    C = bd.intersect(A, B)
    assert C is not None
    assert bd.volume(C) == pytest.approx(0.7, rel=1e-9)
    far = bd.translate(bd.cube(2, 0.5), np.array([5.0, 0.0]))
    assert bd.intersect(A, far) is None
    assert bd.contains(A, np.array([0.49, -0.49]))
    assert not bd.contains(A, np.array([0.51, 0.0]))


def test_ball_affine_rejects_shear():
    ball = bd.Ball(np.zeros(2), 1.0)
    rot = bd.AffineMap(np.array([[0.0, -2.0], [2.0, 0.0]]), np.zeros(2))
    img = bd.apply(rot, ball)
    assert isinstance(img, bd.Ball)
    assert img.radius == pytest.approx(2.0, rel=1e-12)
    shear = bd.AffineMap(np.array([[1.0, 1.0], [0.0, 1.0]]), np.zeros(2))
    with pytest.raises(bd.UnsupportedRepresentation):
        bd.apply(shear, ball)


def test_enumerate_vertices_cube():
    A = np.vstack([np.eye(3), -np.eye(3)])
    verts = bd.enumerate_vertices(A, np.full(6, 0.5))
    assert len(verts) == 8
    assert np.allclose(np.abs(verts), 0.5)


def test_is_symmetric():
    assert bd.is_symmetric(bd.cube(3))
    assert bd.is_symmetric(bd.Ball(np.zeros(2), 1.0))
    assert not bd.is_symmetric(bd.Ball(np.ones(2), 1.0))
    assert not bd.is_symmetric(bd.standard_simplex(2))
