"""Rebuilding a polytope from its facet areas, and Blaschke sums.

Run with ``python demos/02_minkowski_problem.py``.
"""
import numpy as np

from minkval import (DiscreteSphereMeasure, blaschke_sum, check_minkowski_conditions,
                     hausdorff_distance, random_polytope, solve_minkowski, sphere_grid,
                     steiner_point_exact, surface_area_measure, translate)

grid = sphere_grid(3, 24)

# Take a random body, keep only its facet normals and areas, and solve.
P = random_polytope(11, 3, 16)
mu = surface_area_measure(P)
print(f"target: {len(mu)} atoms, total area {mu.total_mass:.6f}")
print("conditions:", check_minkowski_conditions(mu).describe())

rep = solve_minkowski(mu)
print(f"solved in {rep.iterations} Newton steps, residual {rep.final_residual:.2e}, "
      f"converged={rep.converged}")

# The solution is unique up to translation; it is returned with Steiner
# point at the origin, so compare against the recentred original.
P0 = translate(P, -steiner_point_exact(P))
print(f"Hausdorff distance to the original: {hausdorff_distance(rep.polytope, P0, grid):.2e}")

# Measures that violate the closure condition are rejected up front.
bad = DiscreteSphereMeasure(np.eye(3), np.ones(3))
print("\nthree positive axes:", check_minkowski_conditions(bad).describe())

# Blaschke sum: the body whose facet areas are the sum of both.
Q = random_polytope(12, 3, 10)
S = blaschke_sum(P, Q)
lhs = surface_area_measure(S).total_mass
rhs = mu.total_mass + surface_area_measure(Q).total_mass
print(f"\nBlaschke sum has {len(S.facets)} facets; area {lhs:.8f} vs {rhs:.8f}")
