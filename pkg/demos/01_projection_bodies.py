"""Projection bodies, Steiner points and the order-one projection body.

Run with ``python demos/01_projection_bodies.py``.
"""
import numpy as np

from minkval import (Polytope, projection_body, projection_volume, random_polytope,
                     random_rotation, apply_rotation, steiner_point, steiner_point_exact,
                     sphere_grid, zonotope_to_polytope)
from minkval.operators import projection_body_order1_3d

cube = Polytope(np.array([[x, y, z] for x in (-1, 1) for y in (-1, 1) for z in (-1, 1)],
                         float) * 0.5)
print("unit cube:", cube)

# The projection body is a zonotope: one segment per facet, half the facet
# area long.  Its support function gives the volume of the shadow.
Z = projection_body(cube)
print("generators of Pi(cube):\n", Z.generators)
u = np.array([1.0, 2.0, 2.0]) / 3.0
print(f"h(Pi cube, u) = {Z.support(u):.12f}")
print(f"shadow area  = {projection_volume(cube, u):.12f}")

# A generic body: the same identity, now with 10+ generators.
P = random_polytope(5, 3, 14)
Z = projection_body(P)
U = sphere_grid(3, 12).directions
gap = max(abs(Z.support(v) - projection_volume(P, v)) for v in U)
print(f"\nrandom body, {len(Z.generators)} generators, max shadow mismatch {gap:.2e}")
print("Pi P as a polytope:", zonotope_to_polytope(Z))

# Steiner point: exact (external angles) against the sphere quadrature.
s_exact = steiner_point_exact(P)
s_quad = steiner_point(P, sphere_grid(3, 64))
print("\nSteiner point exact     :", s_exact)
print("Steiner point quadrature:", s_quad)
R = random_rotation(1)
moved = steiner_point_exact(apply_rotation(P, R))
print("rotation equivariance error:", np.abs(moved - R.matrix @ s_exact).max())

# Order-one projection body of the cube: its support at e1 is 2.
print("\nh(Pi_1 cube, e1) =", projection_body_order1_3d(cube, np.array([1.0, 0, 0])))
