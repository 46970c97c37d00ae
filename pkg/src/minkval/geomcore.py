"""Convex polytope geometry in low dimensions.

Polytopes are stored by their extreme points.  For full-dimensional
polytopes the facet data (unit outer normals, support numbers, facet
areas, incident vertices) is computed at construction time, so a
:class:`Polytope` is never mutated after ``__init__`` apart from lazily
filled caches of derived quantities (edges, ridges, external angles).

All comparisons use the absolute tolerance ``TOL`` scaled by the
coordinate magnitude of the body, i.e. ``TOL * max(1, max|x|)``.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import NamedTuple

import numpy as np
from scipy.linalg import null_space
from scipy.optimize import linprog
from scipy.spatial import ConvexHull, HalfspaceIntersection, cKDTree
from scipy.special import roots_jacobi

TOL = 1e-9


def sphere_area(n):
    """Surface area of the unit sphere S^{n-1} in R^n."""
    return 2.0 * math.pi ** (n / 2.0) / math.gamma(n / 2.0)


def _scale(pts):
    if pts.size == 0:
        return 1.0
    return max(1.0, float(np.abs(pts).max()))


class FacetRecord(NamedTuple):
    normal: np.ndarray
    offset: float
    area: float
    vertex_indices: tuple


class Ridge(NamedTuple):
    """An (n-2)-face shared by two facets."""
    facets: tuple
    vertex_indices: tuple
    volume: float


# ---------------------------------------------------------------------------
# low level helpers

def _dedupe(pts, tol):
    if len(pts) < 2:
        return pts, np.arange(len(pts))
    tree = cKDTree(pts)
    keep = np.ones(len(pts), bool)
    for i, j in sorted(tree.query_pairs(tol)):
        if keep[i] and keep[j]:
            keep[j] = False
    idx = np.nonzero(keep)[0]
    return pts[idx], idx


def affine_frame(pts, tol=TOL):
    """Return ``(origin, basis, dim)`` of the affine hull of ``pts``.

    ``basis`` has orthonormal rows spanning the direction space.
    """
    origin = pts.mean(axis=0)
    if len(pts) == 1:
        return origin, np.zeros((0, pts.shape[1])), 0
    _, s, vt = np.linalg.svd(pts - origin)
    rank = int(np.sum(s > tol * max(1.0, s[0])))
    return origin, vt[:rank], rank


def _hull2d(xy):
    """Andrew's monotone chain. Returns indices of hull vertices, CCW."""
    order = np.lexsort((xy[:, 1], xy[:, 0]))

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower, upper = [], []
    for i in order:
        while len(lower) >= 2 and cross(xy[lower[-2]], xy[lower[-1]], xy[i]) <= 0:
            lower.pop()
        lower.append(i)
    for i in order[::-1]:
        while len(upper) >= 2 and cross(xy[upper[-2]], xy[upper[-1]], xy[i]) <= 0:
            upper.pop()
        upper.append(i)
    return np.array(lower[:-1] + upper[:-1], int)


def _shoelace(xy):
    x, y = xy[:, 0], xy[:, 1]
    return 0.5 * abs(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))


def hull_volume(points, tol=TOL):
    """Volume of the convex hull of ``points`` in their own ambient space.

    Zero when the points do not span the space.  The 2-dimensional case is
    handled by a monotone chain plus the shoelace formula, without Qhull.
    """
    pts = np.atleast_2d(np.asarray(points, float))
    d = pts.shape[1]
    if d == 1:
        return float(pts.max() - pts.min())
    _, _, rank = affine_frame(pts, tol)
    if rank < d:
        return 0.0
    if d == 2:
        return float(_shoelace(pts[_hull2d(pts)]))
    return float(ConvexHull(pts).volume)


def affine_volume(points, tol=TOL):
    """Return ``(dim, vol)``: affine dimension and intrinsic volume of conv(points).

    A single point has intrinsic volume 1 (counting measure).
    """
    pts = np.atleast_2d(np.asarray(points, float))
    origin, basis, d = affine_frame(pts, tol * _scale(pts))
    if d == 0:
        return 0, 1.0
    return d, hull_volume((pts - origin) @ basis.T, tol)


def _simplex_volumes(pts, simplices):
    """(k-1)-volumes of simplices given as index rows of length k."""
    s = pts[simplices]
    e = s[:, 1:, :] - s[:, :1, :]
    gram = e @ np.swapaxes(e, 1, 2)
    k = simplices.shape[1] - 1
    return np.sqrt(np.clip(np.linalg.det(gram), 0.0, None)) / math.factorial(k)


def _full_hull(pts, tol):
    """Extreme points and facets of a full-dimensional point set.

    Returns ``(ext, normals, offsets, areas, incidence)`` where ``ext``
    indexes into ``pts`` and ``incidence[i, f]`` says whether extreme
    point ``ext[i]`` lies on facet ``f``.
    """
    n = pts.shape[1]
    atol = tol * _scale(pts)
    if n == 1:
        lo, hi = int(np.argmin(pts[:, 0])), int(np.argmax(pts[:, 0]))
        normals = np.array([[-1.0], [1.0]])
        offsets = np.array([-pts[lo, 0], pts[hi, 0]])
        return (np.array([lo, hi]), normals, offsets, np.ones(2),
                np.array([[True, False], [False, True]]))

    hull = ConvexHull(pts)
    eq, simp = hull.equations, hull.simplices
    # Qhull gives all simplices of a merged facet the same equation; the
    # tolerance pass below only catches near-coplanar leftovers
    reps, first, labels = np.unique(eq, axis=0, return_index=True, return_inverse=True)
    labels = labels.reshape(-1)
    merged = np.full(len(reps), -1)
    for i in range(len(reps)):
        if merged[i] >= 0:
            continue
        same = ((merged < 0)
                & (np.abs(reps[:, :n] - reps[i, :n]).max(axis=1) < tol)
                & (np.abs(reps[:, n] - reps[i, n]) < atol))
        merged[same] = i
    labels = merged[labels]
    groups = [np.nonzero(labels == g)[0] for g in np.unique(labels)]

    simplex_area = _simplex_volumes(pts, simp)
    normals, offsets, areas = [], [], []
    for g in groups:
        area = float(simplex_area[g].sum())
        if area <= 1e-15 * _scale(pts) ** (n - 1):
            continue
        on = np.unique(simp[g])
        q = pts[on]
        _, _, vt = np.linalg.svd(q - q.mean(axis=0))
        normal = vt[-1]
        if np.dot(normal, eq[g[0], :n]) < 0:
            normal = -normal
        normals.append(normal)
        offsets.append(float(np.max(pts @ normal)))
        areas.append(area)
    normals, offsets, areas = np.array(normals), np.array(offsets), np.array(areas)

    cand = np.unique(simp)
    inc = np.abs(pts[cand] @ normals.T - offsets) <= atol
    keep = [i for i in range(len(cand))
            if np.linalg.matrix_rank(normals[inc[i]], tol=1e-9) == n]
    return cand[keep], normals, offsets, areas, inc[keep]


# ---------------------------------------------------------------------------
# quadrature on simplices, used for solid angles of polyhedral cones

@lru_cache(maxsize=None)
def _simplex_rule(d, order):
    """Collapsed Gauss-Jacobi rule on the unit reference simplex of dimension d."""
    axes = []
    for k in range(d):
        alpha = d - 1 - k
        x, w = roots_jacobi(order, alpha, 0)
        axes.append(((x + 1) / 2, w / 2 ** (alpha + 1)))
    nodes, weights = [], []
    for combo in itertools.product(range(order), repeat=d):
        xi = [axes[k][0][i] for k, i in enumerate(combo)]
        w = np.prod([axes[k][1][i] for k, i in enumerate(combo)])
        bary, rest = [], 1.0
        for x in xi:
            bary.append(rest * x)
            rest *= 1 - x
        nodes.append(bary)
        weights.append(w)
    return np.array(nodes), np.array(weights)


def _simplex_solid_angle(w, n, order=8, ratio=1.0):
    """Integral of (1 + |z|^2)^(-n/2) over the simplex with vertex rows ``w``.

    Simplices are bisected along their longest edge until the diameter is
    small compared with the distance to the complex poles of the integrand.
    All simplices of one generation are processed together.
    """
    nodes, weights = _simplex_rule(w.shape[1], order)
    k = len(w)
    pairs = np.array(list(itertools.combinations(range(k), 2)))
    batch, total = w[None], 0.0
    while len(batch):
        edges = np.linalg.norm(batch[:, pairs[:, 0]] - batch[:, pairs[:, 1]], axis=2)
        longest = edges.argmax(axis=1)
        r = np.sqrt(1.0 + np.min(np.sum(batch * batch, axis=2), axis=1))
        split = edges[np.arange(len(batch)), longest] > ratio * r
        done = batch[~split]
        if len(done):
            t = done[:, 1:] - done[:, :1]
            z = done[:, None, 0] + np.einsum("qk,skd->sqd", nodes, t)
            f = (1.0 + np.sum(z * z, axis=2)) ** (-n / 2.0)
            total += float(np.abs(np.linalg.det(t)) @ (f @ weights))
        todo, ij = batch[split], pairs[longest[split]]
        if not len(todo):
            break
        idx = np.arange(len(todo))
        mid = 0.5 * (todo[idx, ij[:, 0]] + todo[idx, ij[:, 1]])
        s1, s2 = todo.copy(), todo.copy()
        s1[idx, ij[:, 0]] = mid
        s2[idx, ij[:, 1]] = mid
        batch = np.concatenate([s1, s2])
    return total


def cone_fraction(generators, inner):
    """Fraction of the unit sphere covered by a pointed polyhedral cone.

    ``generators`` are unit vectors spanning the cone; ``inner`` is any
    direction with positive inner product against every generator.
    """
    g = np.asarray(generators, float)
    n = g.shape[1]
    c = inner / np.linalg.norm(inner)
    if n == 2:
        return math.acos(np.clip(g[0] @ g[1], -1.0, 1.0)) / (2 * math.pi)
    basis = null_space(c[None, :]).T
    z = (g / (g @ c)[:, None]) @ basis.T
    center = z.mean(axis=0)
    if n == 3:
        ring = _hull2d(z)
        faces = [(ring[k], ring[(k + 1) % len(ring)]) for k in range(len(ring))]
    else:
        faces = ConvexHull(z).simplices
    total = 0.0
    for face in faces:
        w = np.vstack([center, z[list(face)]])
        total += _simplex_solid_angle(w, n)
    return total / sphere_area(n)


# ---------------------------------------------------------------------------

class Polytope:
    """Convex hull of finitely many points in R^n.

    Parameters
    ----------
    points : array_like, shape (m, n)
        Points whose convex hull is the polytope. Interior and repeated
        points are discarded.
    tol : float, optional
        Geometric tolerance; vertices closer than this are merged.

    Attributes
    ----------
    vertices : ndarray, shape (k, n)
        Extreme points, sorted lexicographically.
    n : int
        Ambient dimension.
    dim : int
        Affine dimension.
    facets : tuple of FacetRecord
        Empty unless ``dim == n``.
    """

    def __init__(self, points, tol=TOL):
        pts = np.atleast_2d(np.array(points, dtype=float))
        if pts.ndim != 2 or pts.shape[0] == 0:
            raise ValueError("need a non-empty (m, n) array of points")
        if not np.all(np.isfinite(pts)):
            raise ValueError("points must be finite")
        self.tol = tol
        self.n = pts.shape[1]
        pts, kept = _dedupe(pts, tol)
        origin, basis, d = affine_frame(pts, tol)
        self.dim = d
        self._frame = (origin, basis)
        self._inner = None
        normals = np.zeros((0, self.n))
        offsets = areas = np.zeros(0)
        inc = np.zeros((0, 0), bool)
        if d == 0:
            ext = np.array([0])
        elif d == self.n:
            ext, normals, offsets, areas, inc = _full_hull(pts, tol)
        else:
            inner = Polytope((pts - origin) @ basis.T, tol)
            ext = inner._source
            self._inner = inner
        order = np.lexsort(pts[ext].T[::-1])
        self.vertices = pts[ext[order]]
        self.vertices.setflags(write=False)
        # indices of the vertices among the input points
        self._source = kept[ext[order]]
        if self._inner is not None:
            # vertex k of P is vertex _inner_order[k] of the intrinsic body
            self._inner_order = order
        inc = inc[order] if inc.size else inc

        fo = np.lexsort(normals.T[::-1]) if len(normals) else np.zeros(0, int)
        self.normals = normals[fo]
        self.offsets = offsets[fo]
        self.areas = areas[fo]
        self._incidence = inc[:, fo] if inc.size else np.zeros((len(self.vertices), 0), bool)
        for arr in (self.normals, self.offsets, self.areas, self._incidence):
            arr.setflags(write=False)
        self.facets = tuple(
            FacetRecord(self.normals[f], float(self.offsets[f]), float(self.areas[f]),
                        tuple(int(i) for i in np.nonzero(self._incidence[:, f])[0]))
            for f in range(len(self.normals)))

    # -- basic queries -----------------------------------------------------

    def __repr__(self):
        return (f"Polytope(n={self.n}, dim={self.dim}, vertices={len(self.vertices)}, "
                f"facets={len(self.facets)})")

    @property
    def is_full(self):
        return self.dim == self.n

    @property
    def atol(self):
        return self.tol * _scale(self.vertices)

    def support(self, u):
        """Support function; ``u`` may be one direction or an (N, n) array."""
        u = np.asarray(u, float)
        vals = self.vertices @ u.T
        return vals.max(axis=0) if vals.ndim > 1 else float(vals.max())

    def centroid(self):
        """Mean of the vertices (an interior point for full-dimensional bodies)."""
        return self.vertices.mean(axis=0)

    @property
    def affine_basis(self):
        """Orthonormal rows spanning the direction space of aff(P)."""
        return self._frame[1]

    def normal_of_hyperplane(self):
        """Unit normal of aff(P) when ``dim == n - 1``."""
        if self.dim != self.n - 1:
            raise ValueError("body is not (n-1)-dimensional")
        return null_space(self._frame[1]).T[0]

    def intrinsic_volume_top(self):
        """Volume of P measured in its own affine hull (``V_dim``)."""
        if self.dim == 0:
            return 1.0
        if self.is_full:
            return volume(self)
        return volume(self._inner)

    # -- derived combinatorics ----------------------------------------------

    @cached_property
    def edges(self):
        """Vertex index pairs of the edges (1-faces)."""
        k = len(self.vertices)
        if self.dim <= 1:
            return ((0, 1),) if k == 2 else ()
        if not self.is_full:
            return tuple(tuple(int(self._inner_to_self[i]) for i in e)
                         for e in self._inner.edges)
        out = []
        inc = self._incidence.astype(float)
        shared = inc @ inc.T
        for i, j in zip(*np.nonzero(np.triu(shared >= self.n - 1, k=1))):
            common = self._incidence[i] & self._incidence[j]
            if np.linalg.matrix_rank(self.normals[common], tol=1e-9) == self.n - 1:
                out.append((int(i), int(j)))
        return tuple(out)

    @cached_property
    def _inner_to_self(self):
        inv = np.empty(len(self.vertices), int)
        inv[self._inner_order] = np.arange(len(self.vertices))
        return inv

    @cached_property
    def ridges(self):
        """(n-2)-faces as :class:`Ridge` records (full-dimensional bodies only)."""
        if not self.is_full or self.n < 2:
            return ()
        out = []
        inc = self._incidence.astype(float)
        shared = inc.T @ inc
        for a, b in zip(*np.nonzero(np.triu(shared >= self.n - 1, k=1))):
            common = np.nonzero(self._incidence[:, a] & self._incidence[:, b])[0]
            d, vol = affine_volume(self.vertices[common], self.tol)
            if d == self.n - 2:
                out.append(Ridge((int(a), int(b)), tuple(int(i) for i in common), vol))
        return tuple(out)

    def two_faces(self):
        """Vertex index tuples of the 2-dimensional faces (n in {2, 3, 4})."""
        if not self.is_full:
            raise ValueError("two_faces needs a full-dimensional polytope")
        if self.n == 2:
            return [tuple(range(len(self.vertices)))]
        if self.n == 3:
            return [f.vertex_indices for f in self.facets]
        if self.n == 4:
            return [r.vertex_indices for r in self.ridges]
        raise ValueError("two_faces supports n <= 4")

    @cached_property
    def external_angles(self):
        """External angle of each vertex (normalized solid angle of its normal cone).

        The angles are intrinsic, so lower-dimensional bodies are handled in
        their affine hull; they always sum to 1.
        """
        if self.dim == 0:
            return np.ones(1)
        if not self.is_full:
            return self._inner.external_angles[self._inner_order]
        if self.n == 1:
            return np.array([0.5, 0.5])
        center = self.centroid()
        out = np.empty(len(self.vertices))
        for i, v in enumerate(self.vertices):
            g = self.normals[self._incidence[i]]
            out[i] = cone_fraction(g, v - center)
        return out


@dataclass(frozen=True)
class Rotation:
    """Proper rotation of R^n."""
    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("rotation matrix must be square")
        if np.abs(m.T @ m - np.eye(len(m))).max() > 1e-12 or np.linalg.det(m) <= 0:
            raise ValueError("matrix is not a proper rotation")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def n(self):
        return len(self.matrix)

    @property
    def inverse(self):
        return Rotation(self.matrix.T)

    def __call__(self, x):
        return np.asarray(x, float) @ self.matrix.T


@dataclass(frozen=True)
class DirectionGrid:
    """Weighted finite set of unit directions discretizing S^{n-1}."""
    directions: np.ndarray
    weights: np.ndarray
    symmetric: bool = field(init=False)

    def __post_init__(self):
        u = np.atleast_2d(np.array(self.directions, float))
        w = np.array(self.weights, float)
        if len(u) == 0:
            raise ValueError("empty direction grid")
        if len(w) != len(u) or np.any(w < 0):
            raise ValueError("need one nonnegative weight per direction")
        if np.abs(np.linalg.norm(u, axis=1) - 1).max() > 1e-12:
            raise ValueError("directions must be unit vectors")
        if abs(w.sum() - 1) > 1e-12:
            raise ValueError("weights must sum to 1")
        u.setflags(write=False)
        w.setflags(write=False)
        object.__setattr__(self, "directions", u)
        object.__setattr__(self, "weights", w)
        dist, _ = cKDTree(u).query(-u)
        object.__setattr__(self, "symmetric", bool(np.all(dist < 1e-12)))

    @property
    def n(self):
        return self.directions.shape[1]

    def __len__(self):
        return len(self.directions)

    @classmethod
    def uniform(cls, directions):
        u = np.atleast_2d(np.asarray(directions, float))
        u = u / np.linalg.norm(u, axis=1)[:, None]
        return cls(u, np.full(len(u), 1.0 / len(u)))


def sphere_grid(n, resolution=32):
    """Antipodally symmetric product quadrature grid on S^{n-1}, n in {2, 3, 4}.

    n = 3 uses Gauss-Legendre nodes in the height coordinate (uniformly
    distributed under the surface measure) times ``2*resolution`` azimuths.
    n = 4 uses the Hopf-type coordinates
    ``(sqrt(1-s) e^{i a}, sqrt(s) e^{i b})`` in which the uniform measure is
    ``ds da db``; Gauss-Legendre in s, ``2*resolution`` angles each for a, b.
    """
    m = 2 * resolution
    phi = 2 * np.pi * (np.arange(m) + 0.5) / m
    if n == 2:
        u = np.column_stack([np.cos(phi), np.sin(phi)])
        return DirectionGrid(u, np.full(m, 1.0 / m))
    x, w = np.polynomial.legendre.leggauss(resolution)
    if n == 3:
        t, a = np.meshgrid(x, phi, indexing="ij")
        r = np.sqrt(1 - t ** 2)
        u = np.stack([r * np.cos(a), r * np.sin(a), t], axis=-1).reshape(-1, 3)
        wt = np.repeat(w / 2 / m, m)
        return DirectionGrid(u / np.linalg.norm(u, axis=1)[:, None], wt / wt.sum())
    if n == 4:
        s = (x + 1) / 2
        S, A, B = np.meshgrid(s, phi, phi, indexing="ij")
        r1, r2 = np.sqrt(1 - S), np.sqrt(S)
        u = np.stack([r1 * np.cos(A), r1 * np.sin(A), r2 * np.cos(B), r2 * np.sin(B)],
                     axis=-1).reshape(-1, 4)
        wt = np.repeat(w / 2 / m ** 2, m * m)
        return DirectionGrid(u / np.linalg.norm(u, axis=1)[:, None], wt / wt.sum())
    raise ValueError("sphere_grid supports n in {2, 3, 4}")


def random_grid(n, count, seed=0):
    """``count`` random directions together with their antipodes, equal weights."""
    rng = np.random.default_rng(seed)
    u = rng.standard_normal((count, n))
    u /= np.linalg.norm(u, axis=1)[:, None]
    return DirectionGrid.uniform(np.vstack([u, -u]))


# ---------------------------------------------------------------------------
# operations

def convex_hull(points, tol=TOL):
    """Polytope spanned by ``points``; all points must share one dimension."""
    try:
        pts = np.array(points, dtype=float)
    except ValueError as exc:
        raise ValueError("points have mismatched dimensions") from exc
    if pts.ndim != 2:
        raise ValueError("points have mismatched dimensions")
    return Polytope(pts, tol)


def support(P, u):
    """h(P, u) = max over vertices of <u, v>."""
    return P.support(u)


def _as_matrix(rot, n):
    m = rot.matrix if isinstance(rot, Rotation) else Rotation(rot).matrix
    if len(m) != n:
        raise ValueError("rotation and polytope dimensions differ")
    return m


def apply_rotation(P, rot):
    return Polytope(P.vertices @ _as_matrix(rot, P.n).T, P.tol)


def translate(P, t):
    t = np.asarray(t, float)
    if t.shape != (P.n,):
        raise ValueError("translation has wrong dimension")
    return Polytope(P.vertices + t, P.tol)


def scale(P, lam):
    if lam < 0:
        raise ValueError("scale factor must be nonnegative")
    if lam == 0:
        return Polytope(np.zeros((1, P.n)), P.tol)
    return Polytope(P.vertices * lam, P.tol)


def reflect(P):
    """The reflected body -P."""
    return Polytope(-P.vertices, P.tol)


def volume(P):
    """n-volume as a sum of pyramids from the vertex centroid over the facets."""
    if not P.is_full:
        return 0.0
    if P.n == 1:
        return float(P.vertices[:, 0].max() - P.vertices[:, 0].min())
    c = P.centroid()
    heights = P.offsets - P.normals @ c
    return float(np.dot(heights, P.areas) / P.n)


def surface_area(P):
    return float(P.areas.sum())


def orthonormal_complement(u):
    """Rows forming an orthonormal basis of the hyperplane orthogonal to ``u``."""
    return null_space(np.atleast_2d(u)).T


def projection_volume(P, u):
    """V_{n-1} of the orthogonal projection of P onto the hyperplane u-perp."""
    u = np.asarray(u, float)
    norm = np.linalg.norm(u)
    if norm == 0:
        raise ValueError("zero direction")
    if abs(norm - 1) > 1e-9:
        raise ValueError("direction must be a unit vector")
    coords = P.vertices @ orthonormal_complement(u).T
    return hull_volume(coords, P.tol)


def hyperplane_section(P, normal, c):
    """P intersected with the hyperplane {x : <normal, x> = c}."""
    normal = np.asarray(normal, float)
    s = P.vertices @ normal - c
    atol = P.atol
    pts = [P.vertices[np.abs(s) <= atol]]
    pairs = P.edges if P.is_full else itertools.combinations(range(len(s)), 2)
    cuts = []
    for i, j in pairs:
        if (s[i] < -atol and s[j] > atol) or (s[i] > atol and s[j] < -atol):
            t = s[i] / (s[i] - s[j])
            cuts.append(P.vertices[i] + t * (P.vertices[j] - P.vertices[i]))
    if cuts:
        pts.append(np.array(cuts))
    pts = np.vstack(pts)
    if len(pts) == 0:
        raise ValueError("hyperplane misses the polytope")
    return Polytope(pts, P.tol), pts


def split_by_hyperplane(P, normal, c, return_section=False):
    """Cut P by {<normal, x> = c} into K (<= side) and M (>= side).

    Raises ``ValueError`` when the hyperplane does not meet the interior.
    """
    normal = np.asarray(normal, float)
    s = P.vertices @ normal - c
    atol = P.atol
    if s.max() <= atol or s.min() >= -atol:
        raise ValueError("hyperplane does not meet the interior of P")
    section, cut = hyperplane_section(P, normal, c)
    K = Polytope(np.vstack([P.vertices[s <= atol], cut]), P.tol)
    M = Polytope(np.vstack([P.vertices[s >= -atol], cut]), P.tol)
    if return_section:
        return K, M, section
    return K, M


def minkowski_sum(P, Q):
    if P.n != Q.n:
        raise ValueError("dimension mismatch")
    sums = (P.vertices[:, None, :] + Q.vertices[None, :, :]).reshape(-1, P.n)
    return Polytope(sums, min(P.tol, Q.tol))


def support_values(body, U):
    """Support values of anything exposing ``support`` (or a callable) on rows of U."""
    if callable(body) and not hasattr(body, "support"):
        return np.asarray(body(U), float)
    return np.asarray(body.support(U), float)


def hausdorff_distance(P, Q, grid):
    """Grid estimate max_u |h(P,u) - h(Q,u)|.

    This is a lower bound for the Hausdorff distance and converges to it as
    the grid is refined.
    """
    U = grid.directions if isinstance(grid, DirectionGrid) else np.atleast_2d(grid)
    if len(U) == 0:
        raise ValueError("empty direction grid")
    return float(np.max(np.abs(support_values(P, U) - support_values(Q, U))))


def random_rotation(seed, n=3):
    rng = np.random.default_rng(seed)
    q, r = np.linalg.qr(rng.standard_normal((n, n)))
    q = q * np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return Rotation(q)


def random_polytope(seed, n, m):
    """Hull of ``m`` seeded standard Gaussian points, resampled until full-dimensional."""
    if m < n + 1:
        raise ValueError("need m >= n + 1 points")
    rng = np.random.default_rng(seed)
    while True:
        P = Polytope(rng.standard_normal((m, n)))
        if P.is_full:
            return P


def halfspace_polytope(A, b, tol=TOL):
    """Polytope {x : A x <= b}, including lower-dimensional intersections.

    Raises ``ValueError`` for empty or unbounded intersections.
    """
    A = np.atleast_2d(np.asarray(A, float))
    b = np.asarray(b, float)
    n = A.shape[1]
    norms = np.linalg.norm(A, axis=1)
    res = linprog(np.r_[np.zeros(n), -1.0], A_ub=np.column_stack([A, norms]), b_ub=b,
                  bounds=[(None, None)] * n + [(0, None)], method="highs")
    if res.status == 3:
        raise ValueError("halfspace intersection is unbounded")
    if res.status != 0:
        raise ValueError("halfspace intersection is empty")
    center, radius = res.x[:n], res.x[n]
    scale_b = max(1.0, float(np.abs(b).max()))
    if radius > 1e-7 * scale_b:
        hs = HalfspaceIntersection(np.column_stack([A, -b]), center)
        return Polytope(hs.intersections, tol)
    # flat: directions with zero width pin down the affine hull
    slack = b - A @ center
    tight = slack <= 1e-7 * scale_b
    eq_dirs = A[tight] / norms[tight, None]
    if n == 1 or np.linalg.matrix_rank(eq_dirs, tol=1e-6) >= n:
        return Polytope(center[None, :], tol)
    comp = null_space(eq_dirs, rcond=1e-6).T
    sub = halfspace_polytope(A[~tight] @ comp.T, b[~tight] - A[~tight] @ center, tol) \
        if np.any(~tight) else None
    if sub is None:
        raise ValueError("halfspace intersection is unbounded")
    return Polytope(center + sub.vertices @ comp, tol)


def is_extreme(points, i):
    """True when ``points[i]`` is not a convex combination of the other points."""
    pts = np.asarray(points, float)
    others = np.delete(pts, i, axis=0)
    if len(others) == 0:
        return True
    A_eq = np.vstack([others.T, np.ones(len(others))])
    b_eq = np.r_[pts[i], 1.0]
    res = linprog(np.zeros(len(others)), A_eq=A_eq, b_eq=b_eq,
                  bounds=[(0, None)] * len(others), method="highs")
    return res.status != 0
