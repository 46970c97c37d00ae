from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from minkval.decomposition import (NotASupportFunctionError, SublinearityVerdict,
                                   component_to_body, decompose, identify_composite,
                                   polytopal_verdict, sample_pairs, sublinearity_check,
                                   vandermonde_coefficients)
from minkval.geomcore import (Polytope, apply_rotation, hausdorff_distance, random_grid,
                              random_polytope, random_rotation, sphere_grid, translate)
from minkval.operators import (composite_operator, identity_operator, projection_body,
                               projection_operator, steiner_point_exact, zonotope_to_polytope)

GRID = sphere_grid(3, 8)


# -- Vandermonde --------------------------------------------------------------

def test_vandermonde_n1():
    c = vandermonde_coefficients(1)
    assert c.exact == ((Fraction(2), Fraction(-1)), (Fraction(-1), Fraction(1)))


@pytest.mark.parametrize("n", range(1, 7))
def test_vandermonde_identity(n):
    c = vandermonde_coefficients(n)
    # exact identity over the rationals, then the float residual
    for i in range(n + 1):
        for j in range(n + 1):
            assert sum(c.exact[j][m - 1] * m ** i for m in range(1, n + 2)) == int(i == j)
    assert c.residual() < 1e-10


def test_vandermonde_n3_residual():
    assert vandermonde_coefficients(3).residual() < 1e-12


def test_vandermonde_range():
    for n in (0, 7):
        with pytest.raises(ValueError):
            vandermonde_coefficients(n)


def test_monomial_input():
    c = vandermonde_coefficients(3)
    vals = np.array([[m ** 3 * 2.5] for m in range(1, 5)])
    np.testing.assert_allclose(c.apply(vals)[:, 0], [0, 0, 0, 2.5], atol=1e-12)


@given(st.lists(st.floats(-10, 10), min_size=5, max_size=5))
def test_polynomial_dilates_recovered(coef):
    c = vandermonde_coefficients(4)
    vals = np.array([[sum(a * m ** j for j, a in enumerate(coef))] for m in range(1, 6)])
    np.testing.assert_allclose(c.apply(vals)[:, 0], coef, atol=1e-9)


# -- decompose ----------------------------------------------------------------

def test_pure_projection():
    K = random_polytope(1, 3, 8)
    dec = decompose(composite_operator(1, 0, 0), K, GRID)
    assert np.abs(dec.components[2] - projection_body(K).support(GRID.directions)).max() < 1e-8
    assert np.delete(dec.norms(), 2).max() < 1e-8
    assert dec.reconstruction_residual() < 1e-9


def test_pure_identity():
    K = random_polytope(2, 3, 8)
    dec = decompose(composite_operator(0, 1, 0), K, GRID)
    U = GRID.directions
    expected = K.support(U) - U @ steiner_point_exact(K)
    assert np.abs(dec.components[1] - expected).max() < 1e-8
    assert np.delete(dec.norms(), 1).max() < 1e-8


def test_composite_two_components():
    K = random_polytope(3, 3, 9)
    dec = decompose(composite_operator(1, 1, 1), K, GRID)
    assert dec.nonzero_degrees() == [1, 2]
    c = identify_composite(dec)
    np.testing.assert_allclose(c, [1, 1, 1], atol=1e-9)


def test_linearity():
    K = random_polytope(4, 3, 8)
    a, b = projection_operator(), identity_operator()
    da, db, dab = (decompose(op, K, GRID) for op in (a, b, a + b))
    assert np.abs(dab.components - da.components - db.components).max() < 1e-9


def test_rotation_property():
    K = random_polytope(5, 3, 8)
    rot = random_rotation(1)
    op = composite_operator(0.5, 0.3, 0.2)
    U = GRID.directions
    d1 = decompose(op, apply_rotation(K, rot), GRID)
    d0 = decompose(op, K, GRID)
    assert np.abs(d1.components - d0.components_at(U @ rot.matrix)).max() < 1e-8


def test_homogeneity_in_direction():
    K = random_polytope(6, 3, 8)
    dec = decompose(composite_operator(1, 1, 0), K, GRID)
    for j in (1, 2):
        assert dec.homogeneity_residual(j) < 1e-9


def test_oracle_failure_propagates():
    from minkval.operators import OperatorHandle

    def bad(P, U):
        raise ArithmeticError("boom")

    with pytest.raises(RuntimeError, match="dilate"):
        decompose(OperatorHandle("bad", bad), random_polytope(1, 3, 6), GRID)


def test_four_dimensional_middle_degree_vanishes():
    K = random_polytope(2, 4, 7)
    g = sphere_grid(4, 4)
    dec = decompose(composite_operator(0.4, 0.7, 0.2), K, g, pair_count=50)
    assert max(dec.norms()[j] for j in (0, 2, 4)) < 1e-7
    np.testing.assert_allclose(identify_composite(dec), [0.4, 0.7, 0.2], atol=1e-9)


# -- sublinearity -------------------------------------------------------------

def test_sublinearity_of_support():
    K = random_polytope(7, 3, 9)
    hpi = projection_body(K).support
    pairs = sample_pairs(GRID.directions, 400)
    assert sublinearity_check(hpi, pairs) <= 1e-9


def test_sublinearity_counterexample():
    pairs = sample_pairs(GRID.directions, 400)
    assert sublinearity_check(lambda U: -np.linalg.norm(U, axis=1), pairs) > 0.1


def test_decomposition_verdicts():
    K = random_polytope(8, 3, 9)
    dec = decompose(composite_operator(1, 1, 1), K, GRID)
    assert all(v.passed for v in dec.sublinearity.values())
    assert dec.sublinearity[2].max_violation < 1e-8
    summary = dec.summary()
    assert set(summary) == {0, 1, 2, 3}
    assert summary[0]["norm"] < 1e-8


def test_hemisphere_corruption_flagged():
    K = random_polytope(9, 3, 9)
    dec = decompose(projection_operator(), K, GRID)

    def corrupted(U):
        f = dec.component(2, U)
        return np.where(U[:, 2] > 0, -f, f)

    viol = sublinearity_check(corrupted, dec.pairs)
    assert viol > 1e-3
    tol = 1e-6 * np.abs(dec.components[2]).max()
    assert not SublinearityVerdict(viol, tol).passed


# -- component_to_body ----------------------------------------------------------

def test_component_to_body_projection_cube(cube):
    g = sphere_grid(3, 24)
    dec = decompose(projection_operator(), cube, g, pair_count=50)
    B = component_to_body(dec.components[2], g, dec.sublinearity[2])
    exact = zonotope_to_polytope(projection_body(cube))
    assert hausdorff_distance(B, exact, g) < 1e-3


def test_component_to_body_point():
    t = np.array([0.3, -0.2, 0.7])
    U = GRID.directions
    P = component_to_body(U @ t, GRID)
    assert P.dim == 0
    np.testing.assert_allclose(P.vertices[0], t, atol=1e-7)


def test_component_to_body_ball():
    prev = np.inf
    for res in (4, 8, 16):
        g = sphere_grid(3, res)
        B = component_to_body(np.ones(len(g)), g)
        assert np.all(np.linalg.norm(B.vertices, axis=1) >= 1 - 1e-9)
        fine = random_grid(3, 2000, 1).directions
        d = float(np.abs(B.support(fine) - 1).max())
        assert d < prev
        prev = d


def test_component_to_body_rejects_failed_verdict():
    with pytest.raises(NotASupportFunctionError):
        component_to_body(np.ones(len(GRID)), GRID, SublinearityVerdict(1.0, 1e-6))


# -- polytopal verdict ----------------------------------------------------------

def test_polytopal_verdict():
    K = random_polytope(3, 3, 8)
    pi = projection_body(K)
    v = polytopal_verdict(pi.support, 3, count=150)
    assert v.polytopal
    ball = polytopal_verdict(lambda U: np.linalg.norm(U, axis=1), 3, count=150)
    assert not ball.polytopal


def test_polytopal_verdict_translated():
    K = translate(random_polytope(1, 3, 9), [1.0, 2.0, -1.0])
    v = polytopal_verdict(K.support, 3, count=150)
    assert v.polytopal
    assert v.vertex_counts[-1] == len(K.vertices)
