"""Exact supertrees under quartet and projection consistency."""

from supertree.newick import SourceEntry, SourceKind, Tree, load_manifest, parse_newick, serialize_newick
from supertree.objectives import (
    build_projection_input,
    build_quartet_input,
    projection_penalty,
    quartet_score,
)
from supertree.solver import (
    OptimumResult,
    SolverOptions,
    majority_consensus,
    optimize_projections,
    optimize_quartets,
    solve_partitioned,
)

__all__ = [
    "OptimumResult",
    "SolverOptions",
    "SourceEntry",
    "SourceKind",
    "Tree",
    "build_projection_input",
    "build_quartet_input",
    "load_manifest",
    "majority_consensus",
    "optimize_projections",
    "optimize_quartets",
    "parse_newick",
    "projection_penalty",
    "quartet_score",
    "serialize_newick",
    "solve_partitioned",
]
