"""Computational toolkit for Minkowski valuations on convex polytopes.

Modules
-------
geomcore
    Polytopes, hulls, support functions, rotations and sphere grids.
measures
    Surface area measures and the first-order area measure in R^3.
operators
    Projection bodies, Steiner point, trivial maps and kernel operators.
minkowski_solver
    Reconstruction of a polytope from its facet areas; Blaschke sums.
decomposition
    Homogeneous decomposition of valuations and sublinearity tests.
harness
    Randomized axiom checks for operator handles.
"""
from .decomposition import (HomogeneousDecomposition, VandermondeCoefficients,
                            component_to_body, decompose, identify_composite,
                            polytopal_verdict, sublinearity_check, vandermonde_coefficients)
from .geomcore import (DirectionGrid, Polytope, Rotation, apply_rotation, convex_hull,
                       halfspace_polytope, hausdorff_distance, projection_volume,
                       random_grid, random_polytope, random_rotation, reflect, scale,
                       sphere_grid, split_by_hyperplane, support, translate, volume)
from .harness import AxiomReport, SuiteConfig, run_suite
from .measures import (ArcMeasure3D, DiscreteSphereMeasure, area_measure_order1_3d,
                       check_minkowski_conditions, merge_measures, surface_area_measure)
from .minkowski_solver import SolveReport, SolverConfig, blaschke_sum, solve_minkowski
from .operators import (KernelPair, OperatorHandle, Zonotope, bm_homomorphism,
                        composite_operator, identity_operator, pi1_operator,
                        projection_body, projection_body_order1_3d, projection_operator,
                        reflection_operator, steiner_point, steiner_point_exact,
                        trivial_map_I, trivial_map_negI, zonotope_to_polytope)

__version__ = "0.1.0"
