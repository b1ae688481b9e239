"""Numerical classification data for generalized Haagerup categories on finite abelian groups."""

from .catalog import catalog_get, catalog_list, catalog_solution
from .constructions import accompany_even, accompany_odd, deequivariantize, dual_graph_data, equivariantize
from .cuntz_formal import FormalAlgebra, Rho, verify_intertwiners, verify_qsystem_isometry
from .group import GroupSpec, automorphism_group, construct_group, parse_group, trivial_group
from .solution import SolutionTriple, check_qsystem, evaluate_residuals, load_solution, save_solution
from .solver import SolveOptions, classify, solve_all, solve_degenerate
from .symmetry import gamma_orbit, gauge_apply, gauge_equivalent

__all__ = [
    "FormalAlgebra",
    "GroupSpec",
    "Rho",
    "SolutionTriple",
    "SolveOptions",
    "accompany_even",
    "accompany_odd",
    "automorphism_group",
    "catalog_get",
    "catalog_list",
    "catalog_solution",
    "check_qsystem",
    "classify",
    "construct_group",
    "deequivariantize",
    "dual_graph_data",
    "equivariantize",
    "evaluate_residuals",
    "gamma_orbit",
    "gauge_apply",
    "gauge_equivalent",
    "load_solution",
    "parse_group",
    "save_solution",
    "solve_all",
    "solve_degenerate",
    "trivial_group",
    "verify_intertwiners",
    "verify_qsystem_isometry",
]
