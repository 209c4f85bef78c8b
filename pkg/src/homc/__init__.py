"""Stationary vectors of higher-order Markov chains.

Build transition tensors with prescribed stationary sets, decide exactly
whether every probability vector is stationary, and search for stationary
vectors numerically.
"""

from .tensor_core import (TransitionTensor, apply, barycenter, col_index, col_unindex, kron_power,
                          load_tensor, probability_vector, residual, save_tensor, tensor_from_json,
                          tensor_to_json, validate, vertex)
from .solvers import (SolutionSet, SolveReport, enumerate_stationary_grid, fixed_point_iterate,
                      multi_start_solve, solve_pipeline, solve_quadratic_2x2)
from .characterize import (ThmOneParams, build_theorem1, count_class_permutations, is_irreducible,
                           is_theorem1_form, is_universally_stationary, monomial_classes)
from .constructions import (ConstructionSpec, build_construction, convex_combine, lift,
                            permute_within_classes, theorem2)
from .analysis import (StationaryDescription, conjecture_probe, edge_dichotomy_check,
                       restrict_to_edge, verify_description)

__version__ = "0.1.0"
