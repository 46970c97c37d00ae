"""Homogeneous decomposition of Minkowski valuations by dilate evaluation.

A translation invariant valuation satisfies h(Phi(mK), u) = sum_j m^j f_j(K, u)
with f_j homogeneous of degree j.  Evaluating at m = 1..n+1 and inverting
the Vandermonde matrix V[m, i] = m^i gives each f_j as a fixed linear
combination of the n+1 dilate values.  Whether a component is itself a
support function is tested through sublinearity.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.spatial import QhullError

from .geomcore import DirectionGrid, Polytope, halfspace_polytope, random_grid, scale
from .operators import steiner_point_exact

#: default sublinearity threshold, relative to max |f| on the grid
TAU_SUB = 1e-6


class NotASupportFunctionError(ValueError):
    """A component failed the sublinearity test and has no associated body."""


# ---------------------------------------------------------------------------
# Vandermonde coefficients

@dataclass(frozen=True)
class VandermondeCoefficients:
    """Matrix a with sum_m a[j, m-1] * m**i = delta_ij for i, j = 0..n."""

    n: int
    exact: tuple
    matrix: np.ndarray = field(repr=False)

    def residual(self):
        m = np.arange(1, self.n + 2, dtype=float)
        V = m[:, None] ** np.arange(self.n + 1)
        return float(np.abs(self.matrix @ V - np.eye(self.n + 1)).max())

    def apply(self, dilate_values):
        """Rows f_j from rows h(Phi(mK), .), m = 1..n+1."""
        return np.tensordot(self.matrix, np.asarray(dilate_values, float), axes=(1, 0))


def _inverse_fraction(M):
    """Gauss-Jordan inverse over the rationals, pivoting on the largest entry."""
    k = len(M)
    A = [list(row) + [Fraction(int(i == j)) for j in range(k)] for i, row in enumerate(M)]
    for col in range(k):
        piv = max(range(col, k), key=lambda r: abs(A[r][col]))
        if A[piv][col] == 0:
            raise ZeroDivisionError("singular matrix")
        A[col], A[piv] = A[piv], A[col]
        p = A[col][col]
        A[col] = [x / p for x in A[col]]
        for r in range(k):
            if r != col and A[r][col] != 0:
                f = A[r][col]
                A[r] = [x - f * y for x, y in zip(A[r], A[col])]
    return [row[k:] for row in A]


def vandermonde_coefficients(n) -> VandermondeCoefficients:
    """Coefficients extracting the degree-j parts from dilates m = 1..n+1.

    The inverse is computed in exact rational arithmetic, then rounded.
    """
    if not 1 <= n <= 6:
        raise ValueError("n must lie in 1..6")
    V = [[Fraction(m) ** i for i in range(n + 1)] for m in range(1, n + 2)]
    inv = _inverse_fraction(V)
    exact = tuple(tuple(row) for row in inv)
    mat = np.array([[float(x) for x in row] for row in inv])
    mat.setflags(write=False)
    return VandermondeCoefficients(n, exact, mat)


# ---------------------------------------------------------------------------
# sublinearity

@dataclass(frozen=True)
class SublinearityVerdict:
    max_violation: float
    tolerance: float

    @property
    def passed(self):
        return self.max_violation <= self.tolerance


def sample_pairs(directions, count=400, seed=0):
    """Random pairs of distinct, non-antipodal rows of ``directions``."""
    U = np.asarray(directions, float)
    rng = np.random.default_rng(seed)
    i = rng.integers(len(U), size=4 * count)
    j = rng.integers(len(U), size=4 * count)
    ok = np.linalg.norm(U[i] + U[j], axis=1) > 1e-6
    ok &= i != j
    i, j = i[ok][:count], j[ok][:count]
    return U[i], U[j]


def sublinearity_check(f, pairs):
    """max over pairs of f(u1 + u2) - f(u1) - f(u2).

    ``f`` maps an (N, n) array of (not necessarily unit) vectors to values;
    it is queried at the unnormalized sums.  Positive values are
    violations of subadditivity.
    """
    U1, U2 = (np.atleast_2d(np.asarray(p, float)) for p in pairs)
    if len(U1) == 0:
        return 0.0
    return float(np.max(f(U1 + U2) - f(U1) - f(U2)))


# ---------------------------------------------------------------------------
# decomposition

class HomogeneousDecomposition:
    """Degree components f_0..f_n of h(Phi K, .) tabulated on a grid.

    Attributes
    ----------
    components : ndarray, shape (n+1, N)
        f_j(K, u) for every grid direction u.
    measured : ndarray, shape (N,)
        h(Phi K, u) as returned by the operator.
    sublinearity : dict
        Degree -> :class:`SublinearityVerdict`.
    """

    def __init__(self, operator, body, grid, coefficients, dilate_values, pairs,
                 tau_sub=TAU_SUB, dilates=None):
        self.operator, self.body, self.grid = operator, body, grid
        self.n = body.n
        self.coefficients = coefficients
        self.dilate_values = np.asarray(dilate_values, float)
        self.components = coefficients.apply(self.dilate_values)
        self.measured = self.dilate_values[0]
        self._dilates = dilates or dilate_family(body)
        self.pairs = pairs
        self.sublinearity = {}
        U1, U2 = pairs
        k = len(U1)
        if k:
            at = self.components_at(np.vstack([U1 + U2, U1, U2]))
            viol = (at[:, :k] - at[:, k:2 * k] - at[:, 2 * k:]).max(axis=1)
        else:
            viol = np.zeros(self.n + 1)
        # vanishing components are judged against the scale of the whole table
        floor = float(np.abs(self.components).max())
        for j in self.degrees:
            tol = tau_sub * max(float(np.abs(self.components[j]).max()), floor, 1e-300)
            self.sublinearity[j] = SublinearityVerdict(float(viol[j]), tol)

    @property
    def degrees(self):
        return range(self.n + 1)

    def component(self, j, U):
        """Re-query f_j(K, .) at arbitrary (not necessarily unit) directions."""
        U = np.atleast_2d(np.asarray(U, float))
        vals = np.array([self.operator(D, U) for D in self._dilates])
        return self.coefficients.matrix[j] @ vals

    def components_at(self, U):
        U = np.atleast_2d(np.asarray(U, float))
        vals = np.array([self.operator(D, U) for D in self._dilates])
        return self.coefficients.apply(vals)

    def norms(self):
        """Sup-norm of each component over the grid."""
        return np.abs(self.components).max(axis=1)

    def reconstruction_residual(self):
        return float(np.abs(self.components.sum(axis=0) - self.measured).max())

    def homogeneity_residual(self, j, lam=(0.5, 2.0, 3.7)):
        """max |f_j(K, lam u) - lam f_j(K, u)|: positive homogeneity in u."""
        U = self.grid.directions
        base = self.components[j]
        return max(float(np.abs(self.component(j, l * U) - l * base).max()) for l in lam)

    def nonzero_degrees(self, tol=1e-7):
        return [j for j in self.degrees if self.norms()[j] >= tol]

    def summary(self):
        """Per degree: sup-norm, sublinearity verdict and violation."""
        norms = self.norms()
        return {j: {"norm": float(norms[j]),
                    "sublinear": bool(self.sublinearity[j].passed),
                    "max_violation": float(self.sublinearity[j].max_violation)}
                for j in self.degrees}


def dilate_family(body):
    """The bodies mK, m = 1..n+1.

    External angles do not change under dilation, so cached angles of K are
    passed on instead of being recomputed for every dilate.
    """
    out = []
    for m in range(1, body.n + 2):
        D = scale(body, m)
        if ("external_angles" in body.__dict__ and D.vertices.shape == body.vertices.shape
                and np.allclose(D.vertices, m * body.vertices, rtol=0, atol=1e-12 * m)):
            D.__dict__["external_angles"] = body.__dict__["external_angles"]
        out.append(D)
    return out


def decompose(operator, body, grid: DirectionGrid, pair_count=400, seed=0,
              tau_sub=TAU_SUB) -> HomogeneousDecomposition:
    """Split h(Phi K, .) into homogeneous components of degrees 0..n."""
    n = body.n
    coeffs = vandermonde_coefficients(n)
    U = grid.directions
    if getattr(operator, "uses_steiner", False) and isinstance(body, Polytope):
        body.external_angles  # noqa: B018  computed once, shared by the dilates
    dilates = dilate_family(body)
    values = []
    for m, D in enumerate(dilates, start=1):
        try:
            values.append(operator(D, U))
        except Exception as exc:
            raise RuntimeError(f"operator failed on the dilate {m}K: {exc}") from exc
    pairs = sample_pairs(U, pair_count, seed)
    return HomogeneousDecomposition(operator, body, grid, coeffs, values, pairs, tau_sub,
                                    dilates)


def component_to_body(values, grid, verdict=None) -> Polytope:
    """Outer approximation {x : <u, x> <= f(u) for all grid u}.

    The result contains the body with support function f and converges to
    it in the Hausdorff metric as the grid is refined.  A failed
    sublinearity verdict is an error: such an f has no body.
    """
    if verdict is not None and not verdict.passed:
        raise NotASupportFunctionError(
            f"sublinearity violation {verdict.max_violation:.3e} exceeds "
            f"{verdict.tolerance:.3e}")
    U = grid.directions if isinstance(grid, DirectionGrid) else np.asarray(grid, float)
    return halfspace_polytope(U, np.asarray(values, float))


# ---------------------------------------------------------------------------
# identification of composite operators

def identify_composite(dec: HomogeneousDecomposition, projection_values=None):
    """Recover (c1, c2, c3) of c1*Pi + c2*I + c3*(-I) from a decomposition.

    c1 is the least squares factor between f_{n-1} and h(Pi K, .).  With
    g(u) = h(K, u) - <s(K), u>, the degree-1 part is c2 g(u) + c3 g(-u); its
    even and odd parts in u determine c2 + c3 and c2 - c3.
    """
    from .operators import projection_body

    n, K, U = dec.n, dec.body, dec.grid.directions
    if n < 3:
        raise ValueError("Pi and I have the same degree when n = 2")
    hpi = projection_body(K).support(U) if projection_values is None else projection_values
    f = dec.components[n - 1]
    c1 = float(f @ hpi / (hpi @ hpi))
    s = steiner_point_exact(K)
    g_plus = K.support(U) - U @ s
    g_minus = K.support(-U) + U @ s
    f1_plus = dec.components[1]
    f1_minus = dec.components_at(-U)[1]
    even_f, odd_f = 0.5 * (f1_plus + f1_minus), 0.5 * (f1_plus - f1_minus)
    even_g, odd_g = 0.5 * (g_plus + g_minus), 0.5 * (g_plus - g_minus)
    total = float(even_f @ even_g / (even_g @ even_g))
    diff = float(odd_f @ odd_g / (odd_g @ odd_g)) if odd_g @ odd_g > 1e-24 else 0.0
    return c1, 0.5 * (total + diff), 0.5 * (total - diff)


# ---------------------------------------------------------------------------
# piecewise linearity

def support_points(f, U, eps=1e-6):
    """Central difference gradients of a support function f at the rows of U.

    Inside the normal cone of a vertex the gradient is that vertex; across
    a kink it is a convex combination of the adjacent ones, so every
    returned point lies in the body up to O(eps) roundoff.
    """
    U = np.atleast_2d(np.asarray(U, float))
    N, n = U.shape
    E = np.eye(n) * eps
    plus = (U[:, None, :] + E[None]).reshape(-1, n)
    minus = (U[:, None, :] - E[None]).reshape(-1, n)
    vals = f(np.vstack([plus, minus]))
    return ((vals[:N * n] - vals[N * n:]) / (2 * eps)).reshape(N, n)


@dataclass(frozen=True)
class PolytopalVerdict:
    """Outcome of reconstructing a body from support values at two refinements."""

    vertex_counts: tuple
    facet_counts: tuple
    support_residual: float
    converged: tuple
    tolerance: float

    @property
    def polytopal(self):
        return (all(self.converged) and self.vertex_counts[0] == self.vertex_counts[1]
                and self.facet_counts[0] == self.facet_counts[1]
                and self.support_residual <= self.tolerance)


def _hull_or_none(X):
    try:
        return Polytope(X, tol=1e-7)
    except (QhullError, ValueError):
        return None


def _gradient_points(f, U, eps, tol):
    """Support points at U, dropping those that fail Euler's identity <x, u> = f(u).

    A central difference whose stencil straddles a kink mixes partial
    derivatives of different vertices and generally fails the identity.
    """
    X = support_points(f, U, eps)
    ok = np.abs(np.einsum("ij,ij->i", X, U) - f(U)) <= tol
    return X[ok]


def reconstruct_from_support(f, n, start, max_vertices=600, max_rounds=60, rel_tol=1e-7,
                             eps=1e-6):
    """Vertex discovery from a support oracle.

    Starting from gradient points at the ``start`` directions, every facet
    of the current hull whose outer normal sees f exceed the hull support
    contributes the gradient at that normal, and points that violate f on
    some facet normal are discarded.  For a polytope this stops once all
    vertices are found; for a smooth body it runs into the vertex budget.
    Returns ``(polytope, converged)``.
    """
    size = max(1.0, float(np.abs(f(start)).max()))
    tol = rel_tol * size
    X = _gradient_points(f, start, eps, tol)
    Q = None
    for _ in range(max_rounds):
        Q = _hull_or_none(X)
        if Q is None:
            return None, False
        if Q.is_full:
            normals = Q.normals
        else:
            # lower-dimensional bodies: also test the start directions
            normals = np.vstack([Q.normals, start]) if len(Q.normals) else start
        fv = f(normals)
        excess = Q.vertices @ normals.T - fv
        outside = excess.max(axis=1) > tol
        bad = fv - (Q.vertices @ normals.T).max(axis=0) > tol
        if not np.any(bad) and not np.any(outside):
            return Q, True
        if len(Q.vertices) > max_vertices:
            return Q, False
        X = np.vstack([Q.vertices[~outside], _gradient_points(f, normals[bad], eps, tol)])
    return Q, False


def polytopal_verdict(f, n, count=200, seed=0, rel_tol=1e-6, max_vertices=600):
    """Decide whether the support function f is piecewise linear.

    Bodies are reconstructed from ``count`` and ``2 * count`` random start
    directions; the verdict is polytopal when both reconstructions
    terminate with the same vertex and facet counts and reproduce f on a
    fresh set of directions.
    """
    bodies, done = [], []
    for k, c in enumerate((count, 2 * count)):
        start = random_grid(n, c, seed + k).directions
        Q, ok = reconstruct_from_support(f, n, start, max_vertices=max_vertices)
        bodies.append(Q)
        done.append(bool(ok))
    if any(Q is None for Q in bodies):
        return PolytopalVerdict((0, 0), (0, 0), np.inf, tuple(done), rel_tol)
    test = random_grid(n, 4 * count, seed + 7).directions
    ref = f(test)
    size = max(1.0, float(np.abs(ref).max()))
    resid = float(np.abs(ref - bodies[1].support(test)).max()) / size
    return PolytopalVerdict(tuple(len(Q.vertices) for Q in bodies),
                            tuple(len(Q.normals) for Q in bodies),
                            resid, tuple(done), rel_tol)
