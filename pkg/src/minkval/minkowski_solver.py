"""Discrete Minkowski problem: recover a polytope from its facet areas.

For unit normals u_i and support numbers h_i let P(h) = {x : <u_i, x> <= h_i}.
The facet areas A(h) are the gradient of h -> V(P(h)), and the Hessian of
the volume has the explicit off-diagonal entries

    dA_i/dh_j = V_{n-2}(F_i cap F_j) / sin(angle(u_i, u_j)).

The solver runs a damped Newton iteration for A(h) proportional to w on
the convex function F(h) = <w, h> - log V(P(h)), whose critical points
satisfy A(h) = V(h) w; a final dilation makes the areas equal to w.  The
Newton system is restricted to the orthogonal complement of the
translation directions h -> h + U t, along which F is constant.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.cluster.hierarchy import fcluster, linkage
from scipy.linalg import null_space
from scipy.optimize import linprog
from scipy.spatial import HalfspaceIntersection, QhullError

from .geomcore import Polytope, hull_volume, orthonormal_complement, translate
from .measures import (DiscreteSphereMeasure, check_minkowski_conditions,
                       merge_measures, surface_area_measure)
from .operators import steiner_point_exact

logger = logging.getLogger(__name__)

MAX_ATOMS = 60


class MinkowskiConditionError(ValueError):
    """The measure is not centered or lies on a great subsphere."""

    def __init__(self, verdict):
        super().__init__(verdict.describe())
        self.verdict = verdict


class FacetDropoutError(RuntimeError):
    """Some atom never acquired a facet, even after restarts."""


class NonConvergenceError(RuntimeError):
    def __init__(self, report):
        super().__init__(f"solver stopped after {report.iterations} iterations, "
                         f"residual {report.final_residual:.3e}")
        self.report = report


@dataclass(frozen=True)
class SolverConfig:
    tol_area: float = 1e-8
    max_iter: int = 200
    damping: float = 1.0
    regularization: float = 1e-12

    def __post_init__(self):
        if self.tol_area <= 0:
            raise ValueError("tol_area must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")
        if not 0 < self.damping <= 1:
            raise ValueError("damping must lie in (0, 1]")


@dataclass(frozen=True)
class SolveReport:
    polytope: Polytope
    iterations: int
    final_residual: float
    converged: bool
    restarts: int = 0


def snap_vertices(X, rel=1e-7):
    """Replace clusters of nearly coincident vertices by their means.

    Near a solution whose vertices lie on more than n facets the iterate
    resolves each such vertex into a cluster of tiny edges; hulling the raw
    cluster produces sliver facets with meaningless normals.
    """
    if len(X) < 2:
        return X
    scale = max(1.0, float(np.ptp(X, axis=0).max()))
    labels = fcluster(linkage(X, "single"), rel * scale, criterion="distance")
    return np.array([X[labels == k].mean(axis=0) for k in np.unique(labels)])


def _flat_volume(points, basis):
    """Volume of conv(points) measured inside the flat spanned by ``basis`` rows."""
    if len(points) <= basis.shape[0]:
        return 0.0
    try:
        return hull_volume(points @ basis.T)
    except QhullError:
        return 0.0


class Cell:
    """Vertices, facet areas, volume and volume Hessian of P(h).

    Combinatorics come from the dual facets reported by the halfspace
    intersection, so very short edges do not merge vertices.
    """

    def __init__(self, U, h):
        self.U, self.h = U, h = np.asarray(U, float), np.asarray(h, float)
        m, n = U.shape
        res = linprog(np.r_[np.zeros(n), -1.0], A_ub=np.column_stack([U, np.ones(m)]),
                      b_ub=h, bounds=[(None, None)] * n + [(0, None)], method="highs")
        if res.status != 0 or res.x[n] <= 1e-9 * max(1.0, float(np.abs(h).max())):
            raise ValueError("P(h) is empty or flat")
        hs = HalfspaceIntersection(np.column_stack([U, -h]), res.x[:n])
        X = hs.intersections
        inc = np.zeros((len(X), m), bool)
        for k, fac in enumerate(hs.dual_facets):
            inc[k, fac] = True
        inc |= np.abs(X @ U.T - h) <= 1e-12 * max(1.0, float(np.abs(X).max()))
        self.vertices, self.incidence = X, inc
        self.areas = np.array([_flat_volume(X[inc[:, i]], orthonormal_complement(U[i]))
                               for i in range(m)])
        self.volume = float(h @ self.areas) / n

    @property
    def polytope(self):
        return Polytope(snap_vertices(self.vertices))

    def hessian(self):
        """Hessian of h -> V(P(h)) at the current support numbers."""
        U, inc, X = self.U, self.incidence, self.vertices
        m, n = U.shape
        H = np.zeros((m, m))
        present = np.nonzero(self.areas > 0)[0]
        sub = inc[:, present].astype(float)
        shared = sub.T @ sub
        for a, b in zip(*np.nonzero(np.triu(shared >= n - 1, k=1))):
            i, j = present[a], present[b]
            if n == 2:
                vol = 1.0
            else:
                basis = null_space(U[[i, j]]).T
                vol = _flat_volume(X[inc[:, i] & inc[:, j]], basis)
            if vol == 0.0:
                continue
            c = float(U[i] @ U[j])
            H[i, j] = H[j, i] = vol / math.sqrt(max(1.0 - c * c, 1e-300))
        H[np.diag_indices(m)] = -np.einsum("ij,ij->i", H, U @ U.T)
        return H


def _try_cell(U, h):
    try:
        return Cell(U, h)
    except (ValueError, QhullError):
        return None


def volume_gradient_check(U, h, eps=1e-6):
    """Max relative gap between central differences of V(P(h)) and the facet areas."""
    U, h = np.asarray(U, float), np.asarray(h, float)
    cell = Cell(U, h)
    worst = 0.0
    for i in range(len(h)):
        e = np.zeros(len(h))
        e[i] = eps
        fd = (Cell(U, h + e).volume - Cell(U, h - e).volume) / (2 * eps)
        worst = max(worst, abs(fd - cell.areas[i]) / max(cell.areas[i], 1e-300))
    return worst


def _lam(A, w, n):
    """Dilation factor that makes the total facet area equal to that of w."""
    return (w.sum() / A.sum()) ** (1.0 / (n - 1))


def _residual(A, w, n):
    """Max relative area residual after the optimal dilation."""
    return float(np.max(np.abs(_lam(A, w, n) ** (n - 1) * A - w) / w))


def _reactivate(U, w, h, cell):
    """Pull redundant halfspaces in until they cut a small facet.

    A facet of zero area has a zero Hessian row, so Newton cannot move it
    sensibly.  Lowering h_i to the current support value leaves P(h)
    unchanged and decreases F by w_i times the shift; cutting slightly
    deeper still decreases F at first order while the volume only loses a
    cap of higher order.  Facets are treated one at a time, trying
    shrinking cut depths, and a move is kept only when F decreases.
    """
    f = float(w @ h) - math.log(cell.volume)
    for i in np.nonzero(cell.areas <= 0)[0]:
        if cell.areas[i] > 0:
            continue
        proj = cell.vertices @ U[i]
        for frac in (1e-2, 1e-3, 1e-4):
            h_new = h.copy()
            h_new[i] = proj.max() - frac * np.ptp(proj)
            trial = _try_cell(U, h_new)
            if trial is None or trial.volume <= 0:
                continue
            f_new = float(w @ h_new) - math.log(trial.volume)
            if f_new < f:
                h, cell, f = h_new, trial, f_new
                break
    return cell, h


def _newton(U, w, h0, cfg, damping):
    """Minimize <w, h> - log V(h).

    Returns (h, cell, iterations, residual, stalled); ``stalled`` is set
    when the line search failed before the iteration cap was reached.
    """
    m, n = U.shape
    Q = null_space(U.T)
    h = h0.copy()
    cell = _try_cell(U, h)
    if cell is None:
        raise ValueError("initial support numbers give an empty cell")
    residual, it, stalled = np.inf, 0, False
    for it in range(1, cfg.max_iter + 1):
        cell, h = _reactivate(U, w, h, cell)
        A, V = cell.areas, cell.volume
        residual = _residual(A, w, n)
        if residual <= cfg.tol_area:
            return _lam(A, w, n) * h, cell, it - 1, residual, False
        grad = w - A / V
        hess = -cell.hessian() / V + np.outer(A, A) / V ** 2
        g = Q.T @ grad
        Hr = Q.T @ hess @ Q
        Hr = 0.5 * (Hr + Hr.T)
        evals, evecs = np.linalg.eigh(Hr)
        floor = cfg.regularization * max(1.0, float(np.abs(evals).max()))
        evals = np.maximum(evals, floor)
        d = -Q @ (evecs @ ((evecs.T @ g) / evals))
        slope = float(grad @ d)
        f0 = float(w @ h) - math.log(V)
        step, accepted = damping, False
        for _ in range(40):
            trial = _try_cell(U, h + step * d)
            if trial is not None and trial.volume > 0:
                f1 = float(w @ (h + step * d)) - math.log(trial.volume)
                noise = 1e-12 * max(1.0, abs(f0))
                if f1 <= f0 + 1e-4 * step * slope and f0 - f1 > noise:
                    accepted = True
                    break
                # near the optimum F is flat to roundoff; use the area residual instead
                if f1 <= f0 + noise and _residual(trial.areas, w, n) < residual:
                    accepted = True
                    break
            step *= 0.5
        logger.debug("iter %d residual %.3e step %.3g", it, residual, step)
        if not accepted:
            logger.debug("line search failed at iteration %d", it)
            stalled = True
            break
        # recenter: translations leave F unchanged and keep 0 inside P(h)
        h_new = h + step * d - U @ trial.vertices.mean(axis=0)
        nxt = _try_cell(U, h_new)
        if nxt is None:
            stalled = True
            break
        h, cell = h_new, nxt
    residual = _residual(cell.areas, w, n)
    return _lam(cell.areas, w, n) * h, cell, it, residual, stalled


def solve_minkowski(mu: DiscreteSphereMeasure, cfg: SolverConfig | None = None) -> SolveReport:
    """Polytope whose facet areas equal the atom weights of ``mu``.

    The solution is unique up to translation; the returned polytope has its
    Steiner point at the origin.  Non-convergence is reported through
    ``converged = False`` rather than raised.
    """
    cfg = cfg or SolverConfig()
    verdict = check_minkowski_conditions(mu)
    if not verdict.passed:
        raise MinkowskiConditionError(verdict)
    U, w = mu.directions, mu.weights
    m, n = U.shape
    if not n + 1 <= m <= MAX_ATOMS:
        raise ValueError(f"need between {n + 1} and {MAX_ATOMS} atoms, got {m}")
    total = w.sum()
    wn = w / total
    # ball-like start for the normalized problem (unit total mass)
    h0 = np.ones(m)

    damping, best = cfg.damping, None
    for restart in range(4):
        h, cell, iters, residual, stalled = _newton(U, wn, h0, cfg, damping)
        # a facet missing at a stall is a dropout; at the iteration cap it is
        # plain non-convergence
        dropped = stalled and bool(np.any(cell.areas <= 0))
        if best is None or residual < best[3]:
            best = (h, cell, iters, residual, restart, dropped)
        if residual <= cfg.tol_area and not dropped:
            break
        logger.info("restart %d: residual %.3e, dropout=%s", restart + 1, residual, dropped)
        damping *= 0.5
    h, cell, iters, residual, restart, dropped = best
    if dropped:
        raise FacetDropoutError("an atom has no facet after 3 restarts")

    # wn was normalized to unit mass; undo that scaling
    h = h * (total ** (1.0 / (n - 1))) / (wn.sum() ** (1.0 / (n - 1)))
    P = Cell(U, h).polytope
    areas = _areas_for(P, U)
    residual = float(np.max(np.abs(areas - w) / w))
    P = translate(P, -steiner_point_exact(P))
    return SolveReport(P, iters, residual, residual <= cfg.tol_area, restart)


def _areas_for(P, U):
    """Facet area of P belonging to each direction in U (0 when absent)."""
    out = np.zeros(len(U))
    for normal, area in zip(P.normals, P.areas):
        k = int(np.argmax(U @ normal))
        out[k] += area
    return out


def blaschke_sum(P: Polytope, Q: Polytope, cfg: SolverConfig | None = None) -> Polytope:
    """Body whose surface area measure is S(P) + S(Q), Steiner point at 0."""
    if not (P.is_full and Q.is_full):
        raise ValueError("Blaschke sum needs full-dimensional bodies")
    report = solve_minkowski(merge_measures(surface_area_measure(P), surface_area_measure(Q)),
                             cfg)
    if not report.converged:
        raise NonConvergenceError(report)
    return report.polytope
