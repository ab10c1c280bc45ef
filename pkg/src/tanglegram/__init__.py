"""Binary tanglegram layout: heuristics, an exact solver, generators and a benchmark harness."""

from .base import SolveResult, TanglegramSolver, TanglegramSolverMixin
from .bench import BenchRecord, performance_ratio, run_benchmark, summarize
from .core import (
    BinaryTree,
    Orientation,
    StructureError,
    Tanglegram,
    count_crossings,
    count_crossings_naive,
    count_inversions,
    lca,
    leaf_order,
    subtree_leaves,
)
from .exact import BruteForce, ExactResult, ExactSolver, InstanceTooLarge, brute_force, build_qubo, evaluate, solve_exact
from .generators import GenConfig, generate, generate_set, write_set
from .hierarchy import HierarchySort, hierarchy_sort
from .io import NewickError, load_tanglegram, parse_newick, read_tanglegram, save_tanglegram, write_newick
from .recursive import RecSplit, RecSplitImproved, rec_split, rec_split_bb, rec_split_improved
from .render import render_svg

__version__ = "0.1.0"

__all__ = [
    "BenchRecord", "BinaryTree", "BruteForce", "ExactResult", "ExactSolver", "GenConfig",
    "HierarchySort", "InstanceTooLarge", "NewickError", "Orientation", "RecSplit", "RecSplitImproved",
    "SolveResult", "StructureError", "Tanglegram", "TanglegramSolver", "TanglegramSolverMixin",
    "brute_force", "build_qubo", "count_crossings", "count_crossings_naive", "count_inversions",
    "evaluate", "generate", "generate_set", "hierarchy_sort", "lca", "leaf_order", "load_tanglegram",
    "parse_newick", "performance_ratio", "read_tanglegram", "rec_split", "rec_split_bb",
    "rec_split_improved", "render_svg", "run_benchmark", "save_tanglegram", "solve_exact",
    "subtree_leaves", "summarize", "write_newick", "write_set",
]
