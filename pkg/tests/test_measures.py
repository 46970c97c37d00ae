import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from minkval.geomcore import (Polytope, apply_rotation, random_polytope, random_rotation,
                              scale, surface_area)
from minkval.measures import (ArcMeasure3D, DiscreteSphereMeasure, area_measure_order1_3d,
                              check_minkowski_conditions, merge_measures,
                              surface_area_measure)

seeds = st.integers(0, 2 ** 31 - 1)
AXES = np.vstack([np.eye(3), -np.eye(3)])


def cube_measure():
    return DiscreteSphereMeasure(AXES, np.ones(6))


def same_atoms(mu, nu, tol=1e-9):
    du, wu = mu.sorted()
    dv, wv = nu.sorted()
    return (len(wu) == len(wv) and np.abs(du - dv).max() < tol
            and np.abs(wu - wv).max() < tol * max(1.0, wu.max()))


def test_cube_measure(cube):
    mu = surface_area_measure(cube)
    assert same_atoms(mu, cube_measure())


def test_simplex_measure(simplex):
    mu = surface_area_measure(simplex)
    expected = DiscreteSphereMeasure(np.vstack([-np.eye(3), np.ones(3) / np.sqrt(3)]),
                                     [0.5, 0.5, 0.5, np.sqrt(3) / 2])
    assert same_atoms(mu, expected)


def test_lower_dimensional_rejected():
    with pytest.raises(ValueError):
        surface_area_measure(Polytope([[0, 0, 0], [1, 0, 0], [0, 1, 0]]))


def test_invalid_measures():
    with pytest.raises(ValueError):
        DiscreteSphereMeasure([[1, 0, 0]], [-1.0])
    with pytest.raises(ValueError):
        DiscreteSphereMeasure([[0, 0, 0]], [1.0])
    with pytest.raises(ValueError):
        DiscreteSphereMeasure([[1, 0, 0], [0, 1, 0]], [1.0])


def test_parallel_atoms_merge():
    mu = DiscreteSphereMeasure([[1, 0, 0], [2, 0, 0], [0, 1, 0]], [1.0, 2.0, 1.0])
    assert len(mu) == 2
    assert mu.weights.max() == 3.0


@given(seeds, st.floats(0.2, 5.0))
def test_scaling_law(seed, lam):
    P = random_polytope(seed, 3, 9)
    mu, nu = surface_area_measure(P), surface_area_measure(scale(P, lam))
    assert same_atoms(nu, mu.scaled(lam ** 2))


def test_cube_scaled_by_two(cube):
    assert np.allclose(surface_area_measure(scale(cube, 2)).weights, 4.0)


@given(seeds, st.sampled_from([3, 4]))
def test_rotation_law_and_closure(seed, n):
    P = random_polytope(seed, n, n + 6)
    rot = random_rotation(seed + 1, n)
    mu = surface_area_measure(P)
    assert same_atoms(surface_area_measure(apply_rotation(P, rot)), mu.rotated(rot))
    assert np.linalg.norm(mu.centroid()) < 1e-9
    assert mu.total_mass == pytest.approx(surface_area(P), rel=1e-12)


def test_total_mass_against_qhull():
    from scipy.spatial import ConvexHull
    for k in range(10):
        P = random_polytope(k, 3, 12)
        assert surface_area_measure(P).total_mass == pytest.approx(
            ConvexHull(P.vertices).area, rel=1e-10)


def test_minkowski_conditions():
    assert check_minkowski_conditions(cube_measure()).passed
    v = check_minkowski_conditions(DiscreteSphereMeasure([[1, 0, 0]], [1.0]))
    assert not v.passed and not v.spanning and v.centroid_residual == pytest.approx(1.0)
    flat = DiscreteSphereMeasure([[1, 0, 0], [-1, 0, 0], [0, 1, 0], [0, -1, 0]], np.ones(4))
    v = check_minkowski_conditions(flat)
    assert v.centroid_residual < 1e-12 and not v.spanning and not v.passed
    assert "great subsphere" in v.describe()


def test_merge():
    mu = cube_measure()
    twice = merge_measures(mu, mu)
    assert same_atoms(twice, mu.scaled(2))
    a = DiscreteSphereMeasure([[1, 0, 0]], [1.0])
    b = DiscreteSphereMeasure([[0, 1, 0]], [2.0])
    ab = merge_measures(a, b)
    assert len(ab) == 2
    empty = DiscreteSphereMeasure(np.zeros((0, 3)), [], n=3)
    assert same_atoms(merge_measures(mu, empty), mu)
    with pytest.raises(ValueError):
        merge_measures(mu, DiscreteSphereMeasure([[1, 0]], [1.0]))


@given(seeds)
def test_merge_commutative_associative(seed):
    P, Q, R = (surface_area_measure(random_polytope(seed + k, 3, 8)) for k in range(3))
    assert same_atoms(merge_measures(P, Q), merge_measures(Q, P), 1e-12)
    assert same_atoms(merge_measures(merge_measures(P, Q), R),
                      merge_measures(P, merge_measures(Q, R)), 1e-12)


# -- first order area measure ------------------------------------------------

def test_cube_arcs(cube):
    arcs = area_measure_order1_3d(cube)
    assert len(arcs) == 12
    np.testing.assert_allclose(arcs.angles, np.pi / 2)
    np.testing.assert_allclose(arcs.densities, 0.5)
    # each arc joins two orthogonal axis normals
    assert np.abs(np.einsum("ij,ij->i", arcs.starts, arcs.ends)).max() < 1e-12
    for a in (arcs.starts, arcs.ends):
        assert np.abs(np.abs(a).max(axis=1) - 1).max() < 1e-12


def test_arc_mass_is_mean_width_multiple(cube):
    # total mass = 2 pi * mean width; for the unit cube the mean width is 3/2
    assert area_measure_order1_3d(cube).total_mass == pytest.approx(3 * np.pi)


@given(seeds, st.floats(0.2, 5.0))
def test_arc_scaling(seed, lam):
    P = random_polytope(seed, 3, 9)
    a, b = area_measure_order1_3d(P), area_measure_order1_3d(scale(P, lam))
    assert b.total_mass == pytest.approx(lam * a.total_mass, rel=1e-10)


def test_arc_rotation(cube):
    P = random_polytope(3, 3, 10)
    rot = random_rotation(5)
    a = area_measure_order1_3d(P).rotated(rot)
    b = area_measure_order1_3d(apply_rotation(P, rot))
    key = lambda m: sorted(zip(np.round(m.densities, 9), np.round(  # noqa: E731
        np.minimum(m.starts.sum(1), m.ends.sum(1)), 6)))
    assert len(a) == len(b)
    assert key(a) == key(b)
    assert a.total_mass == pytest.approx(b.total_mass, rel=1e-12)


def test_arc_validation():
    with pytest.raises(ValueError):
        ArcMeasure3D([[1, 0, 0]], [[-1, 0, 0]], [1.0])
    with pytest.raises(ValueError):
        ArcMeasure3D([[1, 0, 0]], [[0, 1, 0]], [-1.0])
