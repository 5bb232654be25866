"""Constraint programming with classical and simulated-quantum filtering and search."""

from .core import (
    Constraint,
    Csp,
    ProblemError,
    branch,
    check_assignment,
    constraint_holds,
    dump_problem,
    make_domains,
    parse_problem,
)
from .engine import SolveConfig, SolveReport, emit_report, minimize, solve
from .filtering import brute_force_dc, filter_constraint
from .graphs import max_matching_hk, tarjan_scc, verify_matching_maximum
from .models import build_model
from .propagation import propagate
from .qsim import CostModel, QueryLedger, estimate_node_qubits
from .qwalk import SearchTree, build_tree, chunky_search, detect_marked, find_marked

__version__ = "0.1.0"

__all__ = [
    "Constraint", "Csp", "ProblemError", "branch", "check_assignment", "constraint_holds",
    "dump_problem", "make_domains", "parse_problem", "SolveConfig", "SolveReport",
    "emit_report", "minimize", "solve", "brute_force_dc", "filter_constraint",
    "max_matching_hk", "tarjan_scc", "verify_matching_maximum", "build_model", "propagate",
    "CostModel", "QueryLedger", "estimate_node_qubits", "SearchTree", "build_tree",
    "chunky_search", "detect_marked", "find_marked",
]
