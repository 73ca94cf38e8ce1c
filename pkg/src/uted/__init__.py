"""Unrooted tree edit distance for ordered, edge-labeled trees.

The distance between two unrooted trees is the minimum rooted edit
distance (contract an edge, split a vertex, relabel an edge; unit cost)
over all rootings.  It is computed through similarity matrices: one
matrix encodes a rooted tree against every tour window of the other
tree, so all rootings drop out of a single computation.

Engines: ``compute_S_cubic`` (structural recursion with bounded matrix
products) and ``compute_S_subcubic`` (block decomposition).  Desk-scale
oracles referee both.
"""

from ._kernel import KERNEL_KIND, NEG_INF
from .cubic import compute_S_cubic, distances_all_rootings
from .oracle import eta, exhaustive_similarity, rooted_ted_oracle, unrooted_ted_oracle
from .simmatrix import MatrixHandle, mul_bounded, new_matrix, star_similarity
from .subcubic import EngineConfig, compute_S_subcubic, transition_census
from .trees import (
    LabeledTree,
    Segment,
    compose,
    enumerate_rootings,
    euler_tour,
    format_tree,
    parse_tree,
    random_tree,
    segment_tree_of,
    subtract,
)


def unrooted_distance(t1, t2, algo: str = "cubic", **kwargs) -> int:
    """Edit distance between the unrooted views of two trees."""
    if algo == "oracle":
        return unrooted_ted_oracle(t1, t2)
    vec = distances_for(t1, t2, algo=algo, **kwargs)
    return min(vec)


def distances_for(t1, t2, algo: str = "cubic", **kwargs) -> list:
    """Per-rooting distance vector of t1 against every rooting of t2."""
    from .cubic import rooting_distances_from_matrix

    if algo == "cubic":
        s = compute_S_cubic(t1, t2, **kwargs)
    elif algo == "subcubic":
        s = compute_S_subcubic(t1, t2, **kwargs)
    else:
        raise ValueError(f"unknown engine {algo!r}")
    return rooting_distances_from_matrix(s, t1.n_edges, t2.n_edges)


__version__ = "0.1.0"

__all__ = [
    "KERNEL_KIND",
    "NEG_INF",
    "LabeledTree",
    "Segment",
    "MatrixHandle",
    "EngineConfig",
    "parse_tree",
    "format_tree",
    "random_tree",
    "euler_tour",
    "segment_tree_of",
    "enumerate_rootings",
    "compose",
    "subtract",
    "eta",
    "rooted_ted_oracle",
    "exhaustive_similarity",
    "unrooted_ted_oracle",
    "new_matrix",
    "mul_bounded",
    "star_similarity",
    "compute_S_cubic",
    "compute_S_subcubic",
    "distances_all_rootings",
    "distances_for",
    "transition_census",
    "unrooted_distance",
]
