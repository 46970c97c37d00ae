import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.spatial import ConvexHull

from minkval.geomcore import (DirectionGrid, Polytope, Rotation, apply_rotation, convex_hull,
                              halfspace_polytope, hausdorff_distance, is_extreme,
                              minkowski_sum, projection_volume, random_grid, random_polytope,
                              random_rotation, scale, sphere_grid, split_by_hyperplane,
                              support, surface_area, translate, volume)

seeds = st.integers(0, 2 ** 31 - 1)


def shoelace(pts):
    """Area of a planar hull by the shoelace formula (Qhull gives the vertex order)."""
    pts = np.asarray(pts, float)
    h = pts[ConvexHull(pts).vertices]
    x, y = h[:, 0], h[:, 1]
    return 0.5 * abs(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))


def rot_e3(angle):
    c, s = np.cos(angle), np.sin(angle)
    return Rotation(np.array([[c, -s, 0], [s, c, 0], [0, 0, 1]]))


# -- hull -------------------------------------------------------------------

def test_cube_hull(cube):
    assert len(cube.vertices) == 8
    assert len(cube.facets) == 6
    assert cube.dim == 3


def test_simplex_facets(simplex):
    assert len(simplex.facets) == 4
    expected = np.vstack([-np.eye(3), np.ones(3) / np.sqrt(3)])
    for e in expected:
        assert np.min(np.linalg.norm(simplex.normals - e, axis=1)) < 1e-12


def test_redundant_point_dropped(cube):
    P = convex_hull(np.vstack([cube.vertices, [[0.5, 0.5, 0.5]]]))
    np.testing.assert_array_equal(P.vertices, cube.vertices)


def test_dimension_mismatch():
    with pytest.raises(ValueError):
        convex_hull([[0, 0, 0], [1, 0]])


def test_facet_records(cube):
    for f in cube.facets:
        assert abs(np.linalg.norm(f.normal) - 1) < 1e-12
        assert f.area > 0
        assert f.offset == pytest.approx((cube.vertices @ f.normal).max())
        on = cube.vertices[list(f.vertex_indices)] @ f.normal
        assert np.abs(on - f.offset).max() < 1e-9


def test_lower_dimensional_bodies():
    square = Polytope([[0, 0, 0], [1, 0, 0], [0, 1, 0], [1, 1, 0]])
    assert square.dim == 2 and not square.facets
    assert volume(square) == 0.0
    assert square.intrinsic_volume_top() == pytest.approx(1.0)
    point = Polytope([[1.0, 2.0, 3.0]] * 3)
    assert point.dim == 0 and len(point.vertices) == 1


# -- support ----------------------------------------------------------------

def test_support_examples(cube, simplex):
    assert support(cube, [1, 1, 1]) == 3
    assert support(cube, [0, 0, 0]) == 0
    assert support(simplex, [-1, 0, 0]) == 0


@given(seeds)
def test_support_sublinear(seed):
    rng = np.random.default_rng(seed)
    P = random_polytope(seed, 3, 9)
    u1, u2 = rng.standard_normal((2, 1000, 3))
    assert np.all(P.support(u1 + u2) <= P.support(u1) + P.support(u2) + 1e-12)
    lam = rng.uniform(0, 5, 1000)
    np.testing.assert_allclose(P.support(lam[:, None] * u1), lam * P.support(u1),
                               rtol=1e-12, atol=1e-12)


# -- rotations, translation, scaling ----------------------------------------

def test_rotation_identity(cube):
    R = apply_rotation(cube, Rotation(np.eye(3)))
    np.testing.assert_array_equal(R.vertices, cube.vertices)


def test_rotation_rejects_reflection():
    with pytest.raises(ValueError):
        Rotation(np.diag([1.0, 1.0, -1.0]))
    with pytest.raises(ValueError):
        Rotation(np.diag([1.0, 2.0, 1.0]))


def test_rotation_support_identity():
    rng = np.random.default_rng(0)
    worst = 0.0
    for k in range(100):
        P = random_polytope(k, 3, 8)
        rot = random_rotation(1000 + k)
        u = rng.standard_normal(3)
        worst = max(worst, abs(support(apply_rotation(P, rot), rot.matrix @ u) - support(P, u)))
    assert worst < 1e-10


def test_cube_rotated_about_e3(cube):
    R = apply_rotation(cube, rot_e3(np.pi / 2))
    assert volume(R) == pytest.approx(1.0, abs=1e-12)
    expected = np.array([[-y, x, z] for x, y, z in cube.vertices])
    assert np.abs(np.sort(R.vertices, axis=0) - np.sort(expected, axis=0)).max() < 1e-12


def test_translate_scale(cube):
    T = translate(cube, [1, 0, 0])
    np.testing.assert_allclose(T.vertices, cube.vertices + [1, 0, 0])
    assert volume(T) == pytest.approx(1.0)
    assert volume(scale(cube, 2)) == pytest.approx(8.0)
    z = scale(cube, 0)
    assert z.dim == 0 and np.all(z.vertices == 0)
    with pytest.raises(ValueError):
        scale(cube, -1)


@given(seeds, st.floats(0.1, 10))
def test_translate_scale_support(seed, lam):
    rng = np.random.default_rng(seed)
    P = random_polytope(seed, 3, 7)
    t = rng.standard_normal(3)
    U = random_grid(3, 50, seed).directions
    np.testing.assert_allclose(translate(P, t).support(U), P.support(U) + U @ t, atol=1e-12)
    np.testing.assert_allclose(scale(P, lam).support(U), lam * P.support(U),
                               rtol=1e-12, atol=1e-12)


# -- volumes ----------------------------------------------------------------

def test_volumes(cube, simplex):
    assert volume(cube) == pytest.approx(1.0, abs=1e-12)
    assert volume(simplex) == pytest.approx(1 / 6, abs=1e-12)
    face = Polytope([[0, 0, 0], [1, 0, 0], [0, 1, 0]])
    assert volume(face) == 0.0


@given(seeds, st.sampled_from([3, 4]))
def test_volume_matches_qhull(seed, n):
    P = random_polytope(seed, n, n + 6)
    assert volume(P) == pytest.approx(ConvexHull(P.vertices).volume, rel=1e-10)


def test_surface_area_cube(cube):
    assert surface_area(cube) == pytest.approx(6.0)


def test_projection_volumes(cube, simplex):
    e1 = np.array([1.0, 0, 0])
    assert projection_volume(cube, e1) == pytest.approx(1.0, abs=1e-12)
    assert projection_volume(simplex, e1) == pytest.approx(0.5, abs=1e-12)
    d = np.ones(3) / np.sqrt(3)
    assert projection_volume(cube, d) == pytest.approx(np.sqrt(3), abs=1e-12)
    with pytest.raises(ValueError):
        projection_volume(cube, np.zeros(3))


def test_projection_volume_oracle():
    # independent shadow: project onto an explicit basis and hull with the shoelace oracle
    rng = np.random.default_rng(3)
    for k in range(20):
        P = random_polytope(k, 3, 10)
        u = rng.standard_normal(3)
        u /= np.linalg.norm(u)
        a = np.cross(u, [1.0, 0, 0] if abs(u[0]) < 0.9 else [0, 1.0, 0])
        a /= np.linalg.norm(a)
        b = np.cross(u, a)
        shadow = P.vertices @ np.column_stack([a, b])
        assert projection_volume(P, u) == pytest.approx(shoelace(shadow), rel=1e-12)


# -- splits -----------------------------------------------------------------

def test_split_cube_midplane(cube):
    K, M = split_by_hyperplane(cube, [1, 0, 0], 0.5)
    assert volume(K) == pytest.approx(0.5) and volume(M) == pytest.approx(0.5)
    assert K.vertices[:, 0].max() == pytest.approx(0.5)
    assert M.vertices[:, 0].min() == pytest.approx(0.5)


def test_split_simplex_vertex(simplex):
    K, M = split_by_hyperplane(simplex, [1, 0, 0], 0.5)
    counts = sorted([len(K.vertices), len(M.vertices)])
    assert counts == [4, 6]


def test_split_misses_interior(cube):
    with pytest.raises(ValueError):
        split_by_hyperplane(cube, [1, 0, 0], 1.0)


def test_split_volume_additivity():
    rng = np.random.default_rng(11)
    worst = worst_val = 0.0
    done = 0
    while done < 200:
        P = random_polytope(done, 3, 9)
        nrm = rng.standard_normal(3)
        nrm /= np.linalg.norm(nrm)
        c = float(P.centroid() @ nrm)
        K, M, S = split_by_hyperplane(P, nrm, c, return_section=True)
        worst = max(worst, abs(volume(K) + volume(M) - volume(P)))
        # valuation identity of volume: K cap M has zero volume
        worst_val = max(worst_val, abs(volume(K) + volume(M) - volume(P) - volume(S)))
        done += 1
    assert worst < 1e-10
    assert worst_val < 1e-9


# -- Minkowski sum, Hausdorff distance ----------------------------------------

def test_minkowski_sum_examples(cube):
    t = np.array([0.3, -1.0, 2.0])
    S = minkowski_sum(cube, Polytope(t[None, :]))
    np.testing.assert_allclose(S.vertices, translate(cube, t).vertices, atol=1e-15)
    segs = [Polytope([np.zeros(3), e]) for e in np.eye(3)]
    Z = minkowski_sum(minkowski_sum(segs[0], segs[1]), segs[2])
    np.testing.assert_allclose(Z.vertices, cube.vertices, atol=1e-15)


def test_minkowski_sum_support():
    P, Q = random_polytope(1, 3, 8), random_polytope(2, 3, 9)
    U = np.random.default_rng(0).standard_normal((100, 3))
    S = minkowski_sum(P, Q)
    assert np.abs(S.support(U) - P.support(U) - Q.support(U)).max() < 1e-10


def test_hausdorff(cube):
    g = sphere_grid(3, 8)
    assert hausdorff_distance(cube, cube, g) == 0.0
    t = np.array([0.3, 0.4, 0.0])
    coarse = hausdorff_distance(cube, translate(cube, t), sphere_grid(3, 4))
    fine = hausdorff_distance(cube, translate(cube, t), sphere_grid(3, 32))
    assert coarse <= fine + 1e-12 <= 0.5 + 1e-12
    assert fine == pytest.approx(0.5, abs=2e-3)
    P = random_polytope(4, 3, 10)
    eps = 0.01
    bound = eps * np.linalg.norm(P.vertices, axis=1).max()
    assert hausdorff_distance(P, scale(P, 1 + eps), g) <= bound + 1e-12
    with pytest.raises(ValueError):
        hausdorff_distance(cube, cube, np.zeros((0, 3)))


# -- random inputs, determinism ---------------------------------------------

def test_random_objects():
    R = random_rotation(7)
    assert np.abs(R.matrix.T @ R.matrix - np.eye(3)).max() < 1e-12
    assert np.linalg.det(R.matrix) > 0
    assert random_polytope(1, 3, 10).dim == 3
    np.testing.assert_array_equal(random_polytope(5, 4, 12).vertices,
                                  random_polytope(5, 4, 12).vertices)
    np.testing.assert_array_equal(random_rotation(3, 4).matrix, random_rotation(3, 4).matrix)
    with pytest.raises(ValueError):
        random_polytope(0, 3, 3)


# -- invariants -------------------------------------------------------------

@given(seeds, st.sampled_from([3, 4]))
def test_extremality_and_closure(seed, n):
    P = random_polytope(seed, n, n + 7)
    assert all(is_extreme(P.vertices, i) for i in range(len(P.vertices)))
    assert np.abs(P.areas @ P.normals).max() < 1e-9


@given(seeds)
def test_hull_idempotent(seed):
    P = random_polytope(seed, 3, 12)
    Q = convex_hull(P.vertices[::-1])
    np.testing.assert_allclose(Q.vertices, P.vertices, atol=1e-12)


# -- grids and halfspaces -----------------------------------------------------

@pytest.mark.parametrize("n", [2, 3, 4])
def test_sphere_grid(n):
    g = sphere_grid(n, 6)
    assert g.symmetric
    assert abs(g.weights.sum() - 1) < 1e-12
    # second moments of the uniform measure are Id/n
    M = (g.weights[:, None] * g.directions).T @ g.directions
    np.testing.assert_allclose(M, np.eye(n) / n, atol=1e-12)


def test_grid_validation():
    with pytest.raises(ValueError):
        DirectionGrid(np.array([[1.0, 0, 0], [0, 2.0, 0]]), np.array([0.5, 0.5]))
    with pytest.raises(ValueError):
        DirectionGrid(np.array([[1.0, 0, 0]]), np.array([0.5]))
    assert not DirectionGrid.uniform([[1, 0, 0], [0, 1, 0]]).symmetric


def test_halfspace_polytope(cube):
    A = np.vstack([np.eye(3), -np.eye(3)])
    P = halfspace_polytope(A, np.r_[np.ones(3), np.zeros(3)])
    np.testing.assert_allclose(P.vertices, cube.vertices, atol=1e-12)
    with pytest.raises(ValueError):
        halfspace_polytope(np.eye(3), np.ones(3))
    pt = halfspace_polytope(A, np.r_[[1.0, 2, 3], [-1.0, -2, -3]])
    assert pt.dim == 0
    np.testing.assert_allclose(pt.vertices[0], [1, 2, 3], atol=1e-9)
