"""Surface area measures of polytopes as finite measures on the sphere."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geomcore import Polytope

#: atoms u, v are merged when 1 - <u, v> falls below this
MERGE_TOL = 1e-9


def _unit_rows(u):
    """Normalize rows, leaving rows that are already unit untouched (bit-stable I/O)."""
    norms = np.linalg.norm(u, axis=1)
    fix = np.abs(norms - 1.0) > 1e-12
    u = u.copy()
    u[fix] /= norms[fix, None]
    return u


def _merge_atoms(dirs, weights):
    out_u, out_w = [], []
    for u, w in zip(dirs, weights):
        for k, v in enumerate(out_u):
            if 1.0 - float(np.dot(u, v)) < MERGE_TOL:
                total = out_w[k] + w
                merged = (out_w[k] * v + w * u) / total
                out_u[k] = merged / np.linalg.norm(merged)
                out_w[k] = total
                break
        else:
            out_u.append(np.array(u, float))
            out_w.append(float(w))
    return out_u, out_w


class DiscreteSphereMeasure:
    """Finite positive measure on S^{n-1}: weighted unit directions.

    Parallel atoms are merged on construction by adding their weights.
    """

    def __init__(self, directions, weights, n=None):
        u = np.asarray(directions, float)
        w = np.asarray(weights, float).reshape(-1)
        if u.size == 0:
            if n is None:
                raise ValueError("dimension needed for an empty measure")
            u = np.zeros((0, n))
        u = np.atleast_2d(u)
        if len(u) != len(w):
            raise ValueError("need one weight per direction")
        if np.any(w <= 0) or not np.all(np.isfinite(w)):
            raise ValueError("weights must be positive and finite")
        norms = np.linalg.norm(u, axis=1)
        if np.any(norms == 0):
            raise ValueError("zero direction")
        mu, mw = _merge_atoms(_unit_rows(u), w)
        self.n = u.shape[1]
        self.directions = np.array(mu).reshape(-1, self.n)
        self.weights = np.array(mw)
        self.directions.setflags(write=False)
        self.weights.setflags(write=False)

    def __len__(self):
        return len(self.weights)

    def __repr__(self):
        return f"DiscreteSphereMeasure(n={self.n}, atoms={len(self)}, mass={self.total_mass:.6g})"

    @property
    def total_mass(self):
        return float(self.weights.sum())

    def centroid(self):
        """First moment sum_i w_i u_i."""
        return self.weights @ self.directions

    def rotated(self, rot):
        m = getattr(rot, "matrix", rot)
        return DiscreteSphereMeasure(self.directions @ np.asarray(m).T, self.weights)

    def scaled(self, factor):
        return DiscreteSphereMeasure(self.directions, self.weights * factor)

    def sorted(self):
        """Atoms in lexicographic order of direction; handy for comparisons."""
        order = np.lexsort(np.round(self.directions, 9).T[::-1])
        return self.directions[order], self.weights[order]

    def integrate(self, f):
        """Integral of a vectorized function of the direction."""
        return np.tensordot(self.weights, f(self.directions), axes=(0, 0))


def area_atoms(P):
    """Facet directions and areas of P, extended to (n-1)-dimensional bodies.

    An (n-1)-dimensional body carries two atoms, at both unit normals of its
    affine hull, each with its (n-1)-volume.  Lower-dimensional bodies carry
    no surface area.
    """
    if P.is_full:
        return P.normals, P.areas
    if P.dim == P.n - 1:
        nu = P.normal_of_hyperplane()
        a = P.intrinsic_volume_top()
        return np.array([nu, -nu]), np.array([a, a])
    return np.zeros((0, P.n)), np.zeros(0)


def surface_area_measure(P: Polytope) -> DiscreteSphereMeasure:
    """S_{n-1}(P, .): one atom per facet, at its normal, weighted by its area."""
    if not P.is_full:
        raise ValueError("surface area measure needs a full-dimensional polytope")
    return DiscreteSphereMeasure(P.normals, P.areas)


@dataclass(frozen=True)
class MinkowskiVerdict:
    centroid_residual: float
    spanning: bool
    singular_values: tuple
    tolerance: float

    @property
    def passed(self):
        return self.centroid_residual < self.tolerance and self.spanning

    def describe(self):
        parts = [f"centroid residual {self.centroid_residual:.3e} (tol {self.tolerance:.1e})"]
        parts.append("directions span R^n" if self.spanning
                     else "measure concentrated on a great subsphere")
        return "; ".join(parts)


def check_minkowski_conditions(mu, tol=1e-9):
    """Test the two conditions of Minkowski's existence theorem.

    The centroid tolerance is relative to ``max(1, total mass)``.
    """
    residual = float(np.linalg.norm(mu.centroid())) if len(mu) else 0.0
    if len(mu):
        sv = np.linalg.svd(mu.directions, compute_uv=False)
    else:
        sv = np.zeros(0)
    spanning = len(sv) == mu.n and bool(np.all(sv > 1e-9))
    return MinkowskiVerdict(residual, spanning, tuple(float(s) for s in sv),
                            tol * max(1.0, mu.total_mass))


def merge_measures(mu, nu):
    """Sum of two discrete measures (the measure of a Blaschke sum)."""
    if mu.n != nu.n:
        raise ValueError("dimension mismatch")
    return DiscreteSphereMeasure(np.vstack([mu.directions, nu.directions]),
                                 np.concatenate([mu.weights, nu.weights]), n=mu.n)


class ArcMeasure3D:
    """Measure on S^2 spread over minor great-circle arcs with constant density."""

    def __init__(self, starts, ends, densities):
        a = np.atleast_2d(np.asarray(starts, float)).reshape(-1, 3)
        b = np.atleast_2d(np.asarray(ends, float)).reshape(-1, 3)
        d = np.asarray(densities, float).reshape(-1)
        if not (len(a) == len(b) == len(d)):
            raise ValueError("arc arrays have different lengths")
        if np.any(d < 0):
            raise ValueError("densities must be nonnegative")
        a, b = _unit_rows(a), _unit_rows(b)
        if len(a) and np.any(np.abs(np.einsum("ij,ij->i", a, b)) > 1 - 1e-12):
            raise ValueError("arc endpoints must not be equal or antipodal")
        self.starts, self.ends, self.densities = a, b, d
        for arr in (a, b, d):
            arr.setflags(write=False)

    def __len__(self):
        return len(self.densities)

    @property
    def angles(self):
        c = np.einsum("ij,ij->i", self.starts, self.ends)
        return np.arccos(np.clip(c, -1.0, 1.0))

    @property
    def total_mass(self):
        return float(self.densities @ self.angles)

    def frames(self):
        """For each arc: start a, unit tangent b at a, and angle theta.

        The arc is t -> cos(t) a + sin(t) b for t in [0, theta].
        """
        a = self.starts
        c = np.einsum("ij,ij->i", a, self.ends)
        b = self.ends - c[:, None] * a
        b = b / np.linalg.norm(b, axis=1)[:, None]
        return a, b, self.angles

    def rotated(self, rot):
        m = np.asarray(getattr(rot, "matrix", rot))
        return ArcMeasure3D(self.starts @ m.T, self.ends @ m.T, self.densities)


def area_measure_order1_3d(P: Polytope) -> ArcMeasure3D:
    """First-order area measure S_1(P, .) of a 3-polytope.

    Each edge contributes the arc between its two facet normals with density
    length/2 per unit arc length.  This normalization comes from the local
    Steiner formula (the edge wedge of the parallel body has volume
    length * angle * r^2 / 2) and makes S_1 of the unit ball the spherical
    Lebesgue measure; the total mass is 2*pi times the mean width.
    """
    if P.n != 3 or not P.is_full:
        raise ValueError("S_1 is implemented for full-dimensional 3-polytopes")
    starts, ends, dens = [], [], []
    for r in P.ridges:
        fa, fb = r.facets
        starts.append(P.normals[fa])
        ends.append(P.normals[fb])
        dens.append(0.5 * r.volume)
    return ArcMeasure3D(starts, ends, dens)
