"""Solve and locally check systems of mixed least and greatest fixpoint
equations over complete lattices.

The core exposes lattices with join-irreducible bases, equation systems
solved by iteration, and a local game-based checker for single queries
`b <= solution_i`, with up-to techniques, Galois-connection abstractions,
and a special-case decision procedure for meet-preserving functions.
The `applications` package builds verification front ends on top: modal
mu-calculus model checking, (bi)similarity, NFA language equivalence, and
quantitative fixpoint terms over the unit interval.
"""

from .lattice import (Lattice, LatticeError, BasisError, PowersetLattice,
                      RelationLattice, GridLattice, PointwiseFunctionLattice,
                      RationalUnitInterval, hoare_leq, rational_ceil_to_grid,
                      relation_compose, relation_converse, relation_identity,
                      relation_refl_trans_closure, make_powerset,
                      make_relation, make_grid, make_pointwise,
                      make_rational_unit)
from .eqsys import (FixpointSign, MU, NU, MonotonicityError,
                    NonConvergenceError, MonotoneFunction, Equation,
                    EquationSystem, substitute, kleene, kleene_report,
                    solve, solve_epsilon, KleeneReport, SolveReport)
from .game import (Player, ExistsPos, ForallPos, pos_to_json, move_sort_key,
                   GameError, MoveEnumerationError, SelectionBudgetError,
                   forall_moves, exists_moves, minimal_satisfying_tuples,
                   selection, winner_of_play)
from .localsolver import (next_counter, counter_less, counter_leq,
                          CheckStats, CheckOptions, CheckResult,
                          SolverDebugError, check)
from .upto import (UpToFunction, IncompatibleUpToError, check_compatibility,
                   least_closure, transform_system, build_restriction_hook,
                   up_to_check, up_to_transitivity, up_to_bisimilarity,
                   up_to_similarity)
from .abstraction import (GaloisConnection, ConditionReport,
                          verify_connection, check_soundness,
                          check_completeness_abstraction,
                          check_completeness_concretisation,
                          best_abstraction, verify_solution_relation,
                          simulation_connection, grid_abstraction,
                          grid_coarsen)
from .adjoint import (AdjointError, AdjointEquation, AdjointResult,
                      verify_meet_preserving, derive_left_adjoint,
                      case1_check, case2_check)
from . import applications

__version__ = "0.1.0"

__all__ = [
    "Lattice", "LatticeError", "BasisError", "PowersetLattice",
    "RelationLattice", "GridLattice", "PointwiseFunctionLattice",
    "RationalUnitInterval", "hoare_leq", "rational_ceil_to_grid",
    "relation_compose", "relation_converse", "relation_identity",
    "relation_refl_trans_closure", "make_powerset", "make_relation",
    "make_grid", "make_pointwise", "make_rational_unit",
    "FixpointSign", "MU", "NU", "MonotonicityError", "NonConvergenceError",
    "MonotoneFunction", "Equation", "EquationSystem", "substitute",
    "kleene", "kleene_report", "solve", "solve_epsilon", "KleeneReport",
    "SolveReport",
    "Player", "ExistsPos", "ForallPos", "pos_to_json", "move_sort_key",
    "GameError", "MoveEnumerationError", "SelectionBudgetError",
    "forall_moves", "exists_moves", "minimal_satisfying_tuples",
    "selection", "winner_of_play",
    "next_counter", "counter_less", "counter_leq", "CheckStats",
    "CheckOptions", "CheckResult", "SolverDebugError", "check",
    "UpToFunction", "IncompatibleUpToError", "check_compatibility",
    "least_closure", "transform_system", "build_restriction_hook",
    "up_to_check", "up_to_transitivity", "up_to_bisimilarity",
    "up_to_similarity",
    "GaloisConnection", "ConditionReport", "verify_connection",
    "check_soundness", "check_completeness_abstraction",
    "check_completeness_concretisation", "best_abstraction",
    "verify_solution_relation", "simulation_connection", "grid_abstraction",
    "grid_coarsen",
    "AdjointError", "AdjointEquation", "AdjointResult",
    "verify_meet_preserving", "derive_left_adjoint", "case1_check",
    "case2_check",
    "applications",
]
