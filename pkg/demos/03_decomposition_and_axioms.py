"""Splitting a valuation into homogeneous parts, then checking axioms.

Run with ``python demos/03_decomposition_and_axioms.py``.
"""
from minkval import (SuiteConfig, composite_operator, decompose, identify_composite,
                     random_polytope, run_suite, sphere_grid)
from minkval.harness import counterexample_operators
from minkval.operators import projection_operator

K = random_polytope(3, 3, 9)
grid = sphere_grid(3, 12)

# A mixture of degree n-1 and degree 1 pieces.  Evaluating on the dilates
# K, 2K, ..., (n+1)K and inverting a Vandermonde system separates them.
op = composite_operator(0.7, 1.5, 0.25)
dec = decompose(op, K, grid)
for j, row in dec.summary().items():
    print(f"degree {j}: sup-norm {row['norm']:.3e}, sublinear {row['sublinear']}")
print("reconstruction residual:", dec.reconstruction_residual())
print("recovered (c1, c2, c3):", tuple(round(c, 10) for c in identify_composite(dec)))

# The harness runs randomized axiom checks; a deliberately wrong operator
# (projection body scaled by volume) fails the valuation check.
cfg = SuiteConfig(seed=7, grid_resolution=8)
ops = [projection_operator(), counterexample_operators()["volume_scaled"]]
report = run_suite(ops, cfg, composite_recovery=False)
for name, checks in report["operators"].items():
    for axiom, r in checks.items():
        status = "ok  " if r["passed"] else "FAIL"
        print(f"{status} {name:>14s} {axiom:<24s} max residual {r['max_residual']:.1e}")
print("failures:", report["failure_count"])
