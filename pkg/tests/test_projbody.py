"""Polar projection bodies, the shadow-volume functional, radial hulls."""

import math

import numpy as np
import pytest

from convbody import bodies as bd
from convbody import convolution as cv
from convbody import projbody as pb
from convbody import thetabody as tb


def random_polygon(rng, k=8):
    return bd.VPolytope(rng.normal(size=(k, 2)))


def test_disk_polar_projection_is_half_ball():
    grid = tb.SphereGrid.make(2, 256)
    rb = pb.polar_projection_body(bd.Ball(np.zeros(2), 1.0), grid)
    assert np.allclose(rb.radii, 0.5, rtol=1e-12)


def test_square_polar_projection_is_cross_polytope():
    grid = tb.SphereGrid.make(2, 256)
    rb = pb.polar_projection_body(bd.cube(2), grid)
    want = 1.0 / (np.abs(grid.directions[:, 0]) + np.abs(grid.directions[:, 1]))
    assert np.allclose(rb.radii, want, rtol=1e-12)


def test_scaling_shrinks_radii_by_shadow_power():
    rng = np.random.default_rng(2)
    grid = tb.SphereGrid.make(3, 64, seed=5)
    P = bd.VPolytope(rng.normal(size=(12, 3)))
    lam = 1.7
    a = pb.polar_projection_body(P, grid)
    b = pb.polar_projection_body(bd.apply(bd.scaling(3, lam), P), grid)
    assert np.allclose(b.radii, a.radii * lam ** (-2), rtol=1e-9)


def test_functional_known_values():
    grid = tb.SphereGrid.make(2, 2048)
    tri = bd.VPolytope(np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]))
    assert pb.petty_zhang_functional(tri, grid) == pytest.approx(1.5, rel=1e-4)
    assert pb.petty_zhang_functional(bd.cube(2), grid) == pytest.approx(
        2.0, rel=1e-4)
    assert pb.petty_zhang_functional(bd.Ball(np.zeros(2), 3.0), grid) \
        == pytest.approx((math.pi / 2) ** 2, rel=1e-9)
    # affine images of the simplex stay on the floor
    T = bd.AffineMap(np.array([[2.0, 0.7], [0.1, 0.4]]), np.array([3.0, -1.0]))
    assert pb.petty_zhang_functional(bd.apply(T, tri), grid) == pytest.approx(
        1.5, rel=1e-4)


def test_functional_cube3_cross_polytope_value():
    grid = tb.SphereGrid.make(3, 20000, seed=0)
    got = pb.petty_zhang_functional(bd.cube(3), grid)
    assert got == pytest.approx(4.0 / 3.0, rel=1e-2)


def test_petty_zhang_sandwich_random_polygons():
    rng = np.random.default_rng(40)
    grid = tb.SphereGrid.make(2, 1024)
    lo = 1.5 - 1e-2
    hi = (math.pi / 2) ** 2 + 1e-2
    for k in (3, 4, 5, 6, 8, 12):
        for _ in range(3):
            P = random_polygon(rng, k)
            val = pb.petty_zhang_functional(P, grid)
            assert lo <= val <= hi


def test_sc_refinement_inclusions():
    # for a unit-area body, the theta family of self-overlap sets sits
    # between (1-theta) and n(1-theta^(1/n)) times the polar projection body
    rng = np.random.default_rng(41)
    grid = tb.SphereGrid.make(2, 128)
    for _ in range(3):
        P = random_polygon(rng)
        P = bd.apply(bd.scaling(2, 1.0 / math.sqrt(bd.volume(P))), P)
        assert bd.volume(P) == pytest.approx(1.0, rel=1e-9)
        pair = cv.normalize(P, bd.reflect(P))
        rho = pb.polar_projection_body(P, grid).radii
        R = tb.theta_radii_matrix(pair, [0.1, 0.3, 0.5, 0.7, 0.9], grid)
        for j, theta in enumerate((0.1, 0.3, 0.5, 0.7, 0.9)):
            low = (1.0 - theta) * rho
            high = 2.0 * (1.0 - math.sqrt(theta)) * rho
            assert np.all(R[:, j] >= low - 1e-4)
            assert np.all(R[:, j] <= high + 1e-4)


def test_union_lower_bound_on_theta_body():
    rng = np.random.default_rng(42)
    grid = tb.SphereGrid.make(2, 128)
    K = random_polygon(rng)
    L = random_polygon(rng)
    pair = cv.normalize(K, L)
    M = pair.max_overlap
    union = pb.hull_union(pb.polar_projection_body(pair.K, grid),
                          pb.polar_projection_body(pair.L, grid))
    for theta in (0.2, 0.5, 0.8):
        rb = tb.theta_body(pair, theta, grid)
        low = (1.0 - theta) * M * union.radii
        assert np.all(rb.radii >= low - 1e-4)


def test_hull_union_idempotent_and_monotone():
    rng = np.random.default_rng(43)
    grid = tb.SphereGrid.make(2, 96)
    a = pb.polar_projection_body(random_polygon(rng), grid)
    b = pb.polar_projection_body(random_polygon(rng), grid)
    same = pb.hull_union(a, a)
    assert np.allclose(same.radii, a.radii, rtol=1e-9)
    u = pb.hull_union(a, b)
    assert np.all(u.radii >= np.maximum(a.radii, b.radii) - 1e-12)


def test_hull_union_plus_sign():
    # two near-degenerate stars along the axes; the grid hits the axes
    # exactly, so the hull is the square with vertices on them
    grid = tb.SphereGrid.make(2, 64)
    c = np.abs(grid.directions[:, 0])
    s = np.abs(grid.directions[:, 1])
    big = 1e6
    horiz = tb.RadialBody(grid, 1.0 / (c + big * s),
                          np.zeros(64, bool), np.zeros(2), None)
    vert = tb.RadialBody(grid, 1.0 / (s + big * c),
                         np.zeros(64, bool), np.zeros(2), None)
    u = pb.hull_union(horiz, vert)
    want = 1.0 / (c + s)
    assert np.allclose(u.radii, want, rtol=1e-5)


def test_hull_union_grid_and_bounds_errors():
    g1 = tb.SphereGrid.make(2, 64)
    g2 = tb.SphereGrid.make(2, 32)
    a = pb.polar_projection_body(bd.cube(2), g1)
    b = pb.polar_projection_body(bd.cube(2), g2)
    with pytest.raises(bd.DimensionMismatch):
        pb.hull_union(a, b)
    stray = tb.RadialBody(g1, a.radii, np.ones(64, bool), np.zeros(2), None)
    with pytest.raises(bd.UnboundedBody):
        pb.hull_union(a, stray)


def test_polar_projection_covariance_diagonal():
    rng = np.random.default_rng(44)
    P = random_polygon(rng)
    T = bd.AffineMap(np.diag([2.0, 0.7]), np.zeros(2))
    Tinv = np.diag([0.5, 1.0 / 0.7])
    det = 1.4
    grid = tb.SphereGrid.make(2, 128)
    img = pb.polar_projection_body(bd.apply(T, P), grid)
    for u, r_img in zip(grid.directions, img.radii):
        w = Tinv @ u
        nw = np.linalg.norm(w)
        want = 1.0 / (det * nw * bd.projection_volume(P, w / nw))
        assert r_img == pytest.approx(want, rel=1e-6)
