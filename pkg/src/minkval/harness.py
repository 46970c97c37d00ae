"""Randomized checks of operator handles against the defining axioms.

Every trial draws its body, hyperplane, translation, rotation or dilation
factor from its own seed, derived from the suite seed and the trial
index.  Failures store that seed, so any counterexample is replayable with
the matching ``check_*`` function and ``trials=[seed]``.

Residuals are relative: the sup-norm of the discrepancy on the grid
divided by ``max(1, sup-norm of the reference values)``.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .decomposition import decompose, identify_composite, polytopal_verdict
from .geomcore import (Polytope, apply_rotation, random_polytope, random_rotation, scale,
                       sphere_grid, split_by_hyperplane, translate, volume)
from .operators import (OperatorHandle, composite_operator, identity_operator,
                        projection_operator, reflection_operator, resolve_degree)

AXIOMS = ("valuation", "translation", "rotation", "homogeneity", "polytope_output",
          "composite_recovery")


@dataclass(frozen=True)
class AxiomReport:
    axiom: str
    operator: str
    trials: int
    max_residual: float
    tolerance: float
    failures: tuple = ()

    @property
    def passed(self):
        return not self.failures

    def to_dict(self):
        d = asdict(self)
        d["failures"] = [{"seed": int(s), "residual": float(r)} for s, r in self.failures]
        d["passed"] = self.passed
        return d


def _default_trials():
    return {"valuation": 20, "translation": 20, "rotation": 20, "homogeneity": 10,
            "polytope_output": 3, "composite_recovery": 5}


def _default_tolerances():
    return {"exact": 1e-8, "steiner": 1e-5, "polytope_output": 1e-6,
            "composite_recovery": 1e-5}


@dataclass(frozen=True)
class SuiteConfig:
    """Seeds, trial counts, grid resolution and tolerances of a suite run.

    ``dims`` lists the ambient dimensions; trials alternate between them.
    """

    seed: int = 42
    trials: dict = field(default_factory=_default_trials)
    dims: tuple = (3,)
    grid_resolution: int = 12
    tolerances: dict = field(default_factory=_default_tolerances)
    max_points: int = 9
    threads: int = 1

    def __post_init__(self):
        if any(int(v) < 0 for v in self.trials.values()):
            raise ValueError("trial counts must be nonnegative")
        if any(float(v) <= 0 for v in self.tolerances.values()):
            raise ValueError("tolerances must be positive")
        if self.grid_resolution < 2 or self.threads < 1:
            raise ValueError("grid resolution and thread count must be positive")
        if not set(self.dims) <= {3, 4}:
            raise ValueError("supported dimensions are 3 and 4")

    def trial_seeds(self, axiom, count=None):
        """Replayable integer seeds for the trials of one axiom."""
        count = self.trials.get(axiom, 0) if count is None else count
        ss = np.random.SeedSequence([self.seed, AXIOMS.index(axiom)])
        return [int(s) for s in ss.generate_state(count, dtype=np.uint32)]

    def dim_for(self, seed):
        return self.dims[seed % len(self.dims)]

    def grid(self, n):
        return sphere_grid(n, self.grid_resolution if n == 3 else max(4, self.grid_resolution // 2))

    def tolerance_for(self, handle, axiom):
        if axiom in ("polytope_output", "composite_recovery"):
            return self.tolerances[axiom]
        return self.tolerances["steiner" if handle.uses_steiner else "exact"]

    def to_dict(self):
        return {"seed": self.seed, "trials": dict(sorted(self.trials.items())),
                "dims": list(self.dims), "grid_resolution": self.grid_resolution,
                "tolerances": dict(sorted(self.tolerances.items())),
                "max_points": self.max_points}


def trial_body(seed, n, max_points=9):
    """Random full-dimensional polytope for one trial."""
    rng = np.random.default_rng(seed)
    m = int(rng.integers(n + 2, max(n + 3, max_points + 1)))
    return random_polytope(int(rng.integers(2 ** 31)), n, m)


def _relative(diff, ref):
    return float(np.abs(diff).max()) / max(1.0, float(np.abs(ref).max()))


def _run(fn, seeds, threads):
    if threads > 1:
        with ThreadPoolExecutor(threads) as ex:
            return list(ex.map(fn, seeds))
    return [fn(s) for s in seeds]


def _report(axiom, handle, seeds, residuals, tol):
    fails = tuple((s, r) for s, r in zip(seeds, residuals) if not r <= tol)
    return AxiomReport(axiom, handle.name, len(seeds),
                       float(max(residuals)) if residuals else 0.0, tol, fails)


def _seeds(cfg, axiom, trials):
    if trials is None:
        return cfg.trial_seeds(axiom)
    if isinstance(trials, int):
        return cfg.trial_seeds(axiom, trials)
    return [int(s) for s in trials]


# ---------------------------------------------------------------------------
# individual axioms

def split_trial(seed, n, max_points=9):
    """(P, K, M, K cap M) for a random body cut by a random hyperplane.

    The hyperplane passes near the centroid; splits with a lower
    dimensional part are redrawn.
    """
    rng = np.random.default_rng(seed)
    P = trial_body(int(rng.integers(2 ** 31)), n, max_points)
    for _ in range(100):
        normal = rng.standard_normal(n)
        normal /= np.linalg.norm(normal)
        proj = P.vertices @ normal
        c = float(P.centroid() @ normal + 0.2 * (proj.max() - proj.min()) * rng.uniform(-1, 1))
        try:
            K, M, S = split_by_hyperplane(P, normal, c, return_section=True)
        except ValueError:
            continue
        if K.is_full and M.is_full:
            return P, K, M, S
    raise RuntimeError("could not find a nondegenerate split")


def check_valuation(handle: OperatorHandle, trials=None, cfg: SuiteConfig | None = None):
    """h(Phi K) + h(Phi M) = h(Phi P) + h(Phi (K cap M)) for hyperplane splits."""
    cfg = cfg or SuiteConfig()
    seeds = _seeds(cfg, "valuation", trials)

    def one(seed):
        n = cfg.dim_for(seed)
        U = cfg.grid(n).directions
        P, K, M, S = split_trial(seed, n, cfg.max_points)
        lhs = handle(K, U) + handle(M, U)
        rhs = handle(P, U) + handle(S, U)
        return _relative(lhs - rhs, rhs)

    return _report("valuation", handle, seeds, _run(one, seeds, cfg.threads),
                   cfg.tolerance_for(handle, "valuation"))


def check_translation_invariance(handle, trials=None, cfg=None):
    """h(Phi(P + t), u) = h(Phi P, u)."""
    cfg = cfg or SuiteConfig()
    seeds = _seeds(cfg, "translation", trials)

    def one(seed):
        n = cfg.dim_for(seed)
        U = cfg.grid(n).directions
        rng = np.random.default_rng(seed)
        P = trial_body(int(rng.integers(2 ** 31)), n, cfg.max_points)
        t = 2.0 * rng.standard_normal(n)
        ref = handle(P, U)
        return _relative(handle(translate(P, t), U) - ref, ref)

    return _report("translation", handle, seeds, _run(one, seeds, cfg.threads),
                   cfg.tolerance_for(handle, "translation"))


def check_rotation_equivariance(handle, trials=None, cfg=None):
    """h(Phi(theta P), u) = h(Phi P, theta^{-1} u)."""
    cfg = cfg or SuiteConfig()
    seeds = _seeds(cfg, "rotation", trials)

    def one(seed):
        n = cfg.dim_for(seed)
        U = cfg.grid(n).directions
        rng = np.random.default_rng(seed)
        P = trial_body(int(rng.integers(2 ** 31)), n, cfg.max_points)
        rot = random_rotation(int(rng.integers(2 ** 31)), n)
        ref = handle(P, U @ rot.matrix)
        return _relative(handle(apply_rotation(P, rot), U) - ref, ref)

    return _report("rotation", handle, seeds, _run(one, seeds, cfg.threads),
                   cfg.tolerance_for(handle, "rotation"))


def check_homogeneity(handle, degree, trials=None, cfg=None):
    """h(Phi(lam P), u) = lam^d h(Phi P, u) for lam drawn from [0.1, 10]."""
    cfg = cfg or SuiteConfig()
    seeds = _seeds(cfg, "homogeneity", trials)

    def one(seed):
        n = cfg.dim_for(seed)
        d = n - 1 if degree == "n-1" else degree
        U = cfg.grid(n).directions
        rng = np.random.default_rng(seed)
        P = trial_body(int(rng.integers(2 ** 31)), n, cfg.max_points)
        lam = float(rng.uniform(0.1, 10.0))
        ref = lam ** d * handle(P, U)
        return _relative(handle(scale(P, lam), U) - ref, ref)

    return _report("homogeneity", handle, seeds, _run(one, seeds, cfg.threads),
                   cfg.tolerance_for(handle, "homogeneity"))


def check_polytope_output(handle, trials=None, cfg=None, count=150):
    """Polytopal verdict on the output body at two refinements.

    The residual is the relative support mismatch of the reconstruction; a
    verdict of "not polytopal" (unstable counts or no termination) is
    recorded as residual 1.
    """
    cfg = cfg or SuiteConfig()
    seeds = _seeds(cfg, "polytope_output", trials)
    tol = cfg.tolerance_for(handle, "polytope_output")

    def one(seed):
        rng = np.random.default_rng(seed)
        P = trial_body(int(rng.integers(2 ** 31)), 3, cfg.max_points)
        v = polytopal_verdict(lambda U: handle(P, U), 3, count=count, seed=seed % 2 ** 31,
                              rel_tol=tol)
        return float(v.support_residual) if v.polytopal else max(1.0, v.support_residual)

    return _report("polytope_output", handle, seeds, _run(one, seeds, cfg.threads), tol)


def check_composite_recovery(trials=None, cfg=None):
    """Decompose random composites and recover their coefficients.

    Residual: worst relative coefficient error together with the sup-norm of
    the components that should vanish.
    """
    cfg = cfg or SuiteConfig()
    seeds = _seeds(cfg, "composite_recovery", trials)

    def one(seed):
        n = cfg.dim_for(seed)
        rng = np.random.default_rng(seed)
        c = rng.uniform(0.1, 1.0, 3)
        K = trial_body(int(rng.integers(2 ** 31)), n, cfg.max_points)
        dec = decompose(composite_operator(*c), K, cfg.grid(n), pair_count=50, seed=seed)
        got = np.array(identify_composite(dec))
        norms = dec.norms()
        idle = [j for j in dec.degrees if j not in (1, n - 1)]
        return max(float(np.abs(got - c).max() / c.max()),
                   float(norms[idle].max()) if idle else 0.0)

    handle = OperatorHandle("composite", lambda P, U: None)
    return _report("composite_recovery", handle, seeds, _run(one, seeds, cfg.threads),
                   cfg.tolerances["composite_recovery"])


# ---------------------------------------------------------------------------
# constructed counterexamples

def counterexample_operators():
    """Handles that violate one axiom each, for exercising failure paths."""
    return {
        "volume_scaled": OperatorHandle(
            "vol*P", lambda P, U: (volume(P) if P.is_full else 0.0) * P.support(U), None,
            ("rotation",)),
        "no_recenter": OperatorHandle("P", lambda P, U: P.support(U), 1, ("rotation",)),
        "volume_ball": OperatorHandle(
            "vol*B", lambda P, U: (volume(P) if P.is_full else 0.0) * np.linalg.norm(U, axis=1),
            "n"),
    }


# ---------------------------------------------------------------------------
# suites

def default_operators():
    return [projection_operator(), identity_operator(), reflection_operator(),
            composite_operator(1, 1, 1)]


def run_operator(handle, cfg):
    """All applicable axiom checks for one handle, in a fixed order."""
    out = {"valuation": check_valuation(handle, cfg=cfg)}
    if "translation" in handle.equivariances:
        out["translation"] = check_translation_invariance(handle, cfg=cfg)
    if "rotation" in handle.equivariances:
        out["rotation"] = check_rotation_equivariance(handle, cfg=cfg)
    if handle.degree is not None:
        out["homogeneity"] = check_homogeneity(handle, handle.degree, cfg=cfg)
    out["polytope_output"] = check_polytope_output(handle, cfg=cfg)
    return out


def run_suite(operators=None, cfg: SuiteConfig | None = None, composite_recovery=True):
    """Run every applicable check; returns a JSON-ready report document.

    The document contains no timings or host information, so equal
    configurations give identical reports.
    """
    cfg = cfg or SuiteConfig()
    operators = default_operators() if operators is None else list(operators)
    results = {}
    for handle in operators:
        results[handle.name] = {k: r.to_dict() for k, r in run_operator(handle, cfg).items()}
    extra = {}
    if composite_recovery and operators:
        extra["composite_recovery"] = check_composite_recovery(cfg=cfg).to_dict()
    failures = sum(len(r["failures"]) for ops in results.values() for r in ops.values())
    failures += sum(len(r["failures"]) for r in extra.values())
    return {"config": cfg.to_dict(), "operators": results, "theorem_checks": extra,
            "failure_count": failures, "passed": failures == 0}


def resolve(handle, n):
    """Convenience re-export: numeric degree of a handle in dimension n."""
    return resolve_degree(handle, n)


__all__ = ["AxiomReport", "SuiteConfig", "check_valuation", "check_translation_invariance",
           "check_rotation_equivariance", "check_homogeneity", "check_polytope_output",
           "check_composite_recovery", "counterexample_operators", "default_operators",
           "run_operator", "run_suite", "split_trial", "trial_body", "Polytope"]
