"""Lattice cohomology of plumbed 3-manifolds via reduction to bad vertices."""

from .graph import (GraphError, PlumbingGraph, SeifertData, blow_up, chain, dynkin, fix1, fix2,
                    fix3, intersection_form, parse_graph, parse_seifert, star_shaped,
                    validate_graph)
from .lattice import (SpinCClass, canonical_class, char_square, chi, discriminant_group,
                      distinguished_rep, dual_basis, lattice_data)
from .laufer import (BadSet, XCycleCache, artin_fundamental_cycle, is_rational,
                     suggest_bad_set, verify_bad_set, wbar_increment, x_cycle)
from .reduction import (StabilizationError, WeightTable, build_weight_table, cube_weight,
                        render_grid, stabilization_corner)
from .cohomology import (GradedModule, GradedRoot, assemble_graded_module, cohomology_groups,
                         euler_capped_eu, graded_root, restriction_matrix, sublevel_complex,
                         sw_invariant)
from .series import (LSeries, ReducedSeries, coefficient_from_weights, counting_function,
                     decompose_by_class, eu_from_series, expand_zeta, reduce_series,
                     reduced_series, seifert_tau)

__version__ = "0.1.0"
