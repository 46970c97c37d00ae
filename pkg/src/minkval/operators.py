"""Minkowski valuations on polytopes, exposed as support-function oracles.

Every operator is an :class:`OperatorHandle`: a pure function
``(polytope, directions) -> support values`` plus metadata.  Concrete
bodies are produced where they are cheap to describe exactly (the
projection body is a :class:`Zonotope`, the trivial maps return
polytopes).
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.interpolate import BarycentricInterpolator
from scipy.linalg import null_space

from .geomcore import DirectionGrid, Polytope, reflect, translate
from .measures import area_atoms, area_measure_order1_3d

PARALLEL_TOL = 1e-9


# ---------------------------------------------------------------------------
# zonotopes

class Zonotope:
    """center + sum of segments [-g_i, g_i].

    Parallel (or antiparallel) generators are combined into one.
    """

    def __init__(self, generators, center=None, n=None):
        g = np.asarray(generators, float)
        if g.size == 0:
            if n is None and center is None:
                raise ValueError("dimension needed for a zonotope without generators")
            n = n if n is not None else len(center)
            g = np.zeros((0, n))
        g = np.atleast_2d(g)
        self.n = g.shape[1]
        merged = []
        for v in g:
            if np.linalg.norm(v) == 0:
                continue
            for k, w in enumerate(merged):
                c = np.dot(v, w) / (np.linalg.norm(v) * np.linalg.norm(w))
                if 1 - abs(c) < PARALLEL_TOL:
                    merged[k] = w + math.copysign(1.0, c) * v
                    break
            else:
                merged.append(v.copy())
        self.generators = np.array(merged).reshape(-1, self.n)
        self.center = np.zeros(self.n) if center is None else np.asarray(center, float)
        self.generators.setflags(write=False)

    def __repr__(self):
        return f"Zonotope(n={self.n}, generators={len(self.generators)})"

    def support(self, u):
        u = np.asarray(u, float)
        return u @ self.center + np.abs(u @ self.generators.T).sum(axis=-1)


def projection_body(P: Polytope) -> Zonotope:
    """Projection body of P as a zonotope with generators area_i/2 * normal_i.

    An (n-1)-dimensional P gives the segment with support V_{n-1}(P)|<u, nu>|;
    bodies of dimension at most n-2 give the origin.
    """
    dirs, w = area_atoms(P)
    return Zonotope(0.5 * w[:, None] * dirs, np.zeros(P.n), n=P.n)


def _zonotope_vertices(G, tol):
    """Vertices of the zonotope sum [-g, g] for generators spanning R^r."""
    k, r = G.shape
    if r == 1:
        s = np.abs(G[:, 0]).sum()
        return np.array([[-s], [s]])
    pts = []
    gnorm = np.linalg.norm(G, axis=1)
    for S in itertools.combinations(range(k), r - 1):
        if np.linalg.matrix_rank(G[list(S)], tol=1e-12) < r - 1:
            continue
        u = null_space(G[list(S)]).T[0]
        s = G @ u
        flat = np.abs(s) <= tol * gnorm
        for side in (1.0, -1.0):
            base = (np.sign(side * s[~flat])[:, None] * G[~flat]).sum(axis=0)
            for signs in itertools.product((-1.0, 1.0), repeat=int(flat.sum())):
                pts.append(base + np.asarray(signs) @ G[flat])
    return np.unique(np.round(np.array(pts), 12), axis=0)


def zonotope_to_polytope(Z: Zonotope, max_generators=20) -> Polytope:
    """Vertex enumeration of a zonotope.

    Every facet normal is orthogonal to r-1 independent generators; for
    each such normal the facet vertices follow from the signs of the
    remaining generators.  Exact up to round-off for any generator set.
    """
    G = Z.generators
    if len(G) > max_generators:
        raise ValueError(f"zonotope has {len(G)} generators, limit is {max_generators}")
    if len(G) == 0:
        return Polytope(Z.center[None, :])
    _, s, vt = np.linalg.svd(G)
    r = int(np.sum(s > 1e-12 * max(1.0, s[0])))
    basis = vt[:r]
    local = _zonotope_vertices(G @ basis.T, 1e-12)
    return Polytope(Z.center + local @ basis)


def is_centrally_symmetric(points, tol=1e-8):
    """True when the finite point set is symmetric about its mean."""
    pts = np.asarray(points, float)
    c = pts.mean(axis=0)
    mirrored = 2 * c - pts
    d = np.linalg.norm(mirrored[:, None, :] - pts[None, :, :], axis=2)
    return bool(np.all(d.min(axis=1) <= tol))


# ---------------------------------------------------------------------------
# Steiner point and the trivial maps

def steiner_point(P, grid: DirectionGrid):
    """Quadrature Steiner point n * sum_i w_i h(P, u_i) u_i.

    ``P`` is anything with a ``support`` method.  The grid must be
    antipodally symmetric; on a symmetric grid with exact second moments
    the rule reproduces translations exactly.  For polytopes the error is
    of order mesh^2 because the support function has kinks.
    """
    if not grid.symmetric:
        raise ValueError("Steiner quadrature needs an antipodally symmetric grid")
    U = grid.directions
    n = U.shape[1]
    h = np.asarray(P.support(U), float)
    return n * (grid.weights * h) @ U


def steiner_point_exact(P):
    """Steiner point as the external-angle weighted sum of vertices.

    Zonotopes are centrally symmetric, so their Steiner point is the center.
    """
    if isinstance(P, Zonotope):
        return P.center.copy()
    return P.external_angles @ P.vertices


def _steiner(P, grid):
    return steiner_point_exact(P) if grid is None else steiner_point(P, grid)


def trivial_map_I(P, grid=None):
    """I(P) = P - s(P)."""
    return translate(P, -_steiner(P, grid))


def trivial_map_negI(P, grid=None):
    """(-I)(P) = -P + s(P)."""
    return translate(reflect(P), _steiner(P, grid))


# ---------------------------------------------------------------------------
# operator handles

@dataclass(frozen=True)
class OperatorHandle:
    """Support-function oracle of a body-valued map.

    ``support(P, U)`` returns h(Phi P, u) for the rows u of U.  ``degree``
    is the claimed homogeneity degree (None when mixed or unknown);
    ``uses_steiner`` flags operators whose accuracy depends on the
    Steiner point computation.
    """
    name: str
    support: Callable
    degree: int | None = None
    equivariances: tuple = ("translation", "rotation")
    uses_steiner: bool = False
    meta: dict = field(default_factory=dict, compare=False)

    def __call__(self, P, U):
        return np.asarray(self.support(P, np.atleast_2d(U)), float)

    def body(self, P):
        """Adapter exposing ``support`` for a fixed input body."""
        return _BoundOperator(self, P)

    def __add__(self, other):
        deg = self.degree if self.degree == other.degree else None
        return OperatorHandle(
            f"({self.name} + {other.name})",
            lambda P, U: self(P, U) + other(P, U),
            deg, tuple(e for e in self.equivariances if e in other.equivariances),
            self.uses_steiner or other.uses_steiner)

    def __mul__(self, c):
        c = float(c)
        return OperatorHandle(f"{c:g}*{self.name}", lambda P, U: c * self(P, U),
                              self.degree, self.equivariances, self.uses_steiner)

    __rmul__ = __mul__


class _BoundOperator:
    def __init__(self, op, P):
        self.op, self.P = op, P

    def support(self, U):
        U = np.asarray(U, float)
        out = self.op(self.P, U)
        return out if U.ndim > 1 else float(out[0])


def _pi_support(P, U):
    return projection_body(P).support(U)


def _I_support(P, U, grid=None):
    return P.support(U) - U @ _steiner(P, grid)


def _negI_support(P, U, grid=None):
    return P.support(-U) + U @ _steiner(P, grid)


def projection_operator():
    return OperatorHandle("Pi", _pi_support, "n-1", meta={"kind": "Pi"})


def identity_operator(grid=None):
    return OperatorHandle("I", lambda P, U: _I_support(P, U, grid), 1,
                          uses_steiner=True, meta={"kind": "I"})


def reflection_operator(grid=None):
    return OperatorHandle("-I", lambda P, U: _negI_support(P, U, grid), 1,
                          uses_steiner=True, meta={"kind": "-I"})


def composite_operator(c1, c2, c3, grid=None):
    """c1*Pi + c2*I + c3*(-I) with nonnegative coefficients."""
    if min(c1, c2, c3) < 0:
        raise ValueError("coefficients must be nonnegative")
    c1, c2, c3 = float(c1), float(c2), float(c3)

    def support(P, U):
        out = np.zeros(len(U))
        if c1:
            out += c1 * _pi_support(P, U)
        if c2 or c3:
            s = _steiner(P, grid)
            if c2:
                out += c2 * (P.support(U) - U @ s)
            if c3:
                out += c3 * (P.support(-U) + U @ s)
        return out

    nonzero = [c for c in (c1, c2 + c3) if c]
    if c1 and not (c2 or c3):
        degree = "n-1"
    elif (c2 or c3) and not c1:
        degree = 1
    else:
        degree = None if nonzero else 0
    return OperatorHandle(f"composite({c1:g},{c2:g},{c3:g})", support, degree,
                          uses_steiner=bool(c2 or c3),
                          meta={"kind": "composite", "coefficients": (c1, c2, c3)})


def resolve_degree(handle, n):
    """Numeric homogeneity degree of ``handle`` in ambient dimension n (or None)."""
    if handle.degree == "n-1":
        return n - 1
    return handle.degree


# ---------------------------------------------------------------------------
# Blaschke-Minkowski homomorphisms from kernels

def chebyshev_nodes(count=64):
    """Chebyshev extreme points cos(pi k/(count-1)), symmetric about 0."""
    return np.cos(np.pi * np.arange(count) / (count - 1))


class KernelPair:
    """Even/odd kernel pair (p, q) on [-1, 1].

    Either callables or tabulations at :func:`chebyshev_nodes` are accepted;
    tables are interpolated barycentrically.
    """

    def __init__(self, p, q, name=None, nodes=64, tol=1e-12):
        self.name = name
        self.table_p = self.table_q = None
        t = chebyshev_nodes(nodes)
        if not callable(p):
            self.table_p = np.asarray(p, float)
            p = BarycentricInterpolator(chebyshev_nodes(len(self.table_p)), self.table_p)
        if not callable(q):
            self.table_q = np.asarray(q, float)
            q = BarycentricInterpolator(chebyshev_nodes(len(self.table_q)), self.table_q)
        self.p, self.q = p, q
        pt, qt = np.asarray(p(t), float), np.asarray(q(t), float)
        if np.abs(pt - pt[::-1]).max() > tol:
            raise ValueError("kernel p is not even")
        if np.abs(qt + qt[::-1]).max() > tol:
            raise ValueError("kernel q is not odd")

    @classmethod
    def projection(cls):
        """p(t) = |t|/2, q = 0: the kernel of the projection body operator."""
        return cls(lambda t: 0.5 * np.abs(t), lambda t: np.zeros_like(np.asarray(t, float)),
                   name="projection")

    @classmethod
    def from_tables(cls, cheb_p, cheb_q):
        return cls(np.asarray(cheb_p, float), np.asarray(cheb_q, float))

    def __call__(self, t):
        t = np.clip(t, -1.0, 1.0)
        return np.asarray(self.p(t), float) + np.asarray(self.q(t), float)


def bm_homomorphism(kernel: KernelPair) -> OperatorHandle:
    """h(Psi P, u) = sum over facets of [p + q](<u, n_i>) * area_i."""

    def support(P, U):
        dirs, w = area_atoms(P)
        if len(w) == 0:
            return np.zeros(len(U))
        return kernel(U @ dirs.T) @ w

    return OperatorHandle(f"bmh[{kernel.name or 'table'}]", support, "n-1",
                          meta={"kind": "bmh"})


# ---------------------------------------------------------------------------
# projection body of order one in R^3

def _arc_abs_integral(alpha, beta, theta):
    """Integral over t in [0, theta] of |alpha cos t + beta sin t|, theta < pi."""
    R = np.hypot(alpha, beta)
    phi = np.arctan2(beta, alpha)
    # zeros of cos(t - phi) lie at phi + pi/2 + k pi
    z = np.mod(phi + np.pi / 2, np.pi)
    F = lambda t: R * np.sin(t - phi)  # noqa: E731
    inside = z < theta
    split = np.where(inside, z, theta)
    return np.abs(F(split) - F(0.0)) + np.where(inside, np.abs(F(theta) - F(split)), 0.0)


def projection_body_order1_3d(P: Polytope, u, arcs=None):
    """h(Pi_1 P, u) = 1/2 * integral of |<u, v>| against S_1(P, .).

    Along each arc <u, v(t)> is a sinusoid; the arc is split at its zero and
    integrated in closed form.
    """
    U = np.atleast_2d(np.asarray(u, float))
    if np.abs(np.linalg.norm(U, axis=1) - 1).max() > 1e-9:
        raise ValueError("direction must be a unit vector")
    arcs = area_measure_order1_3d(P) if arcs is None else arcs
    a, b, theta = arcs.frames()
    vals = _arc_abs_integral(U @ a.T, U @ b.T, theta[None, :]) @ arcs.densities
    out = 0.5 * vals
    return float(out[0]) if np.ndim(u) == 1 else out


def pi1_operator():
    """Pi_1 as a handle (full-dimensional 3-polytopes only)."""

    def support(P, U):
        norms = np.linalg.norm(U, axis=1)
        safe = np.where(norms > 0, norms, 1.0)
        return norms * projection_body_order1_3d(P, U / safe[:, None])

    return OperatorHandle("Pi_1", support, 1, meta={"kind": "Pi_1"})
