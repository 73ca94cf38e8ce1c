"""Shared test helpers: independent oracles and enumerations."""

from __future__ import annotations

import random
from itertools import product

import numpy as np

from uted import oracle
from uted.simmatrix import NEG_INF, masked_dense
from uted.trees import LabeledTree, Segment, build_tree, random_tree, segment_tree_of


def random_pair(rng: random.Random, max_edges: int, alphabet: int = 3):
    t = random_tree(rng.randint(1, max_edges), seed=rng.randrange(1 << 30), alphabet=alphabet)
    q = random_tree(rng.randint(1, max_edges), seed=rng.randrange(1 << 30), alphabet=alphabet)
    return t, q


def band_mask(dense: np.ndarray, l: int) -> np.ndarray:
    """Copy with every cell outside the valid band forced to -inf."""
    side = dense.shape[0] - 1
    out = np.full_like(dense, NEG_INF)
    for i in range(1, side + 1):
        hi = min(side, i + l)
        if hi >= i:
            out[i, i : hi + 1] = dense[i, i : hi + 1]
    return out


def naive_star(a, b) -> np.ndarray:
    """Band-masked (max,+) product computed independently with numpy.

    Valid cells only: that is the product contract.
    """
    A = masked_dense(a).astype(np.int64)
    B = masked_dense(b).astype(np.int64)
    side = a.side
    C = np.full_like(A, 4 * NEG_INF)
    for i in range(1, side + 1):
        C[i, 1:] = (A[i, 1:, None] + B[1:, 1:]).max(axis=0)
    C = np.where(C < NEG_INF // 2, NEG_INF, C)
    return band_mask(C.astype(np.int32), a.l)


def segment_oracle_value(t: LabeledTree, q: LabeledTree, tour, i: int, j: int) -> int:
    """Definitional cell value: similarity of t against the window's tree."""
    seg = segment_tree_of(q, tour, Segment(i, j))
    return t.n_edges + seg.n_edges - oracle.rooted_ted_oracle(t, seg)


def forest_shapes(k: int, _memo={0: [()]}) -> list[tuple]:
    """All ordered forest shapes with k edges (nested tuples)."""
    if k in _memo:
        return _memo[k]
    out = []
    for first in range(1, k + 1):
        for child_forest in forest_shapes(first - 1):
            for rest in forest_shapes(k - first):
                out.append((child_forest,) + rest)
    _memo[k] = out
    return out


def all_labeled_trees(max_edges: int, alphabet: tuple[str, ...]) -> list[LabeledTree]:
    """Every rooted ordered edge-labeled tree with up to ``max_edges`` edges."""
    trees = []
    for k in range(max_edges + 1):
        for shape in forest_shapes(k):
            for labs in product(alphabet, repeat=k):
                it = iter(labs)
                edges = []

                def emit(forest, parent):
                    for child_forest in forest:
                        me = len(edges) + 1
                        edges.append((parent, me, next(it)))
                        emit(child_forest, me)

                emit(shape, 0)
                trees.append(build_tree(edges))
    return trees
