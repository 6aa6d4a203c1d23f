"""Symmetry-handling cuts and presolving for maximum-weight stable set, with an
exact polyhedral verification lab and a branch-and-cut solver."""

from ._kernels import JIT_ENABLED
from .graph import Graph, OutForest, parse_dimacs
from .lp import LpResult, solve_lp
from .permgroup import Bsgs, graph_automorphisms, schreier_sims
from .polyhedra import IneqSystem, RatMatrix, TuVerdict, is_totally_unimodular
from .solver import SETTINGS, Settings, SolveResult, branch_and_cut
from .sst import LeaderPolicy, SstPlan, presolve, run_sst_algorithm

__all__ = [
    "JIT_ENABLED", "Graph", "OutForest", "parse_dimacs", "LpResult", "solve_lp", "Bsgs",
    "graph_automorphisms", "schreier_sims", "IneqSystem", "RatMatrix", "TuVerdict",
    "is_totally_unimodular", "SETTINGS", "Settings", "SolveResult", "branch_and_cut",
    "LeaderPolicy", "SstPlan", "presolve", "run_sst_algorithm",
]
__version__ = "0.1.0"
