"""Cubic-time similarity engine.

Computes the similarity matrix of a rooted tree T against every tour
window of an unrooted tree Q by structural recursion over a linear family
of subproblems: child prefixes of a vertex and child subtrees hung with
their parent edge.  A prefix with no edges is the all-zero matrix, a
single-edge top is one stamping pass over Q's edge occurrences, and a
multi-child prefix is a bounded (max,+) product of its two parts.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import simmatrix as sm
from ._kernel import kernel
from .trees import EulerTour, LabeledTree, euler_tour

__all__ = [
    "CubicStats",
    "EngineContext",
    "compute_S_cubic",
    "case_b_step",
    "case_c_step",
    "distances_all_rootings",
    "rooting_distances_from_matrix",
]


@dataclass
class CubicStats:
    subproblems: int = 0
    products: int = 0
    extend_steps: int = 0


class EngineContext:
    """Per-(Q) engine state: tour, occurrence and label arrays.

    When law checking is on, every similarity matrix an engine produces
    through this context gets audited and violations accumulate in
    ``law_violations``.
    """

    def __init__(self, q: LabeledTree, backend: str = "dense", check_laws: bool = False,
                 tour: Optional[EulerTour] = None):
        if q.n_edges < 1:
            raise ValueError("the segmented tree needs at least one edge")
        ids = sorted(q.edge_id[1:])
        if ids != list(range(q.n_edges)):
            raise ValueError("segmented tree must carry dense edge ids 0..m-1")
        self.q = q
        self.m_q = q.n_edges
        self.side = 4 * self.m_q
        self.l = 2 * self.m_q
        self.backend = backend
        self.check_laws = check_laws
        self.law_violations: list[str] = []
        self.matrices_checked = 0
        self.tour = tour if tour is not None else euler_tour(q)
        occ = np.zeros((self.m_q, 4), dtype=np.int32)
        for eid, positions in self.tour.occ.items():
            occ[eid] = positions
        self.occ = occ
        labels = np.zeros(self.m_q, dtype=np.int64)
        for v in range(1, q.n_nodes):
            labels[q.edge_id[v]] = q.edge_label[v]
        self.q_edge_labels = labels
        self._eta_cache: dict[int, np.ndarray] = {}

    def eta_row(self, label_id: int) -> np.ndarray:
        row = self._eta_cache.get(label_id)
        if row is None:
            row = (1 + (self.q_edge_labels == label_id)).astype(np.int32)
            self._eta_cache[label_id] = row
        return row

    def zero_matrix(self) -> sm.MatrixHandle:
        return sm.full_zero_matrix(self.side, self.backend)


def case_b_step(
    s_prev: sm.MatrixHandle,
    top_label: int,
    q: LabeledTree,
    tour: Optional[EulerTour] = None,
    ctx: Optional[EngineContext] = None,
) -> sm.MatrixHandle:
    """Similarity matrix of T' from S(T' - ru), ru being the sole root edge.

    For each edge e of Q and each consecutive occurrence pair, stamps
    the value of the inner window plus the match weight of ru against e
    onto every window containing the pair.
    """
    if ctx is None:
        ctx = EngineContext(q, backend=s_prev.backend, tour=tour)
    raw = kernel.case_b_kernel(s_prev.raw(), ctx.l, ctx.occ, ctx.eta_row(top_label))
    t_edges = None if s_prev.t_edges is None else s_prev.t_edges + 1
    return sm.from_raw(raw, s_prev.backend, t_edges)


def case_c_step(
    s_left: sm.MatrixHandle,
    s_right: sm.MatrixHandle,
    t_left_edges: int,
    t_right_edges: int,
) -> sm.MatrixHandle:
    """Similarity matrix of a multi-child prefix as a bounded product."""
    return sm.mul_bounded(s_left, s_right, 2 * t_left_edges, 2 * t_right_edges)


def _check(ctx: EngineContext, handle: sm.MatrixHandle):
    if ctx.check_laws:
        ctx.matrices_checked += 1
        ctx.law_violations.extend(sm.check_similarity_laws(handle))


def compute_S_cubic(
    t: LabeledTree,
    q: LabeledTree,
    backend: str = "dense",
    check_laws: bool = False,
    capture_root_prefixes: Optional[list[int]] = None,
    stats: Optional[CubicStats] = None,
    ctx: Optional[EngineContext] = None,
) -> sm.MatrixHandle | tuple[sm.MatrixHandle, dict[int, sm.MatrixHandle]]:
    """Similarity matrix of rooted ``t`` against all tour windows of ``q``.

    With ``capture_root_prefixes`` the matrices of the listed child
    prefixes of t's root are returned as well (one engine run serves a
    whole prefix family).
    """
    if ctx is None:
        ctx = EngineContext(q, backend=backend, check_laws=check_laws)
    if stats is None:
        stats = CubicStats()

    sizes = t.subtree_edge_count()
    children = t.children

    def prefix_key(v: int, k: int):
        if k == 0:
            return ("z",)
        if k == 1:
            return ("h", children[v][0])
        return ("p", v, k)

    def deps_of(key):
        if key[0] == "z":
            return ()
        if key[0] == "h":
            c = key[1]
            return (prefix_key(c, len(children[c])),)
        _, v, k = key
        return (prefix_key(v, k - 1), ("h", children[v][k - 1]))

    def prefix_edges(v: int, k: int) -> int:
        return sum(sizes[c] + 1 for c in children[v][:k])

    capture_keys = {}
    if capture_root_prefixes is not None:
        for k in capture_root_prefixes:
            capture_keys[prefix_key(0, k)] = k

    memo: dict = {}
    computed = 0
    captures: dict[int, sm.MatrixHandle] = {}
    root_key = prefix_key(0, len(children[0]))
    stack = [root_key]
    while stack:
        key = stack[-1]
        if key in memo:
            stack.pop()
            continue
        deps = deps_of(key)
        missing = [d for d in deps if d not in memo]
        if missing:
            stack.extend(missing)
            continue
        if key[0] == "z":
            h = ctx.zero_matrix()
        elif key[0] == "h":
            c = key[1]
            (dep,) = deps
            prev = memo[dep]
            raw = kernel.case_b_kernel(prev.raw(), ctx.l, ctx.occ, ctx.eta_row(t.edge_label[c]))
            h = sm.from_raw(raw, ctx.backend, sizes[c] + 1)
            stats.extend_steps += 1
            if dep not in capture_keys and dep != ("z",):
                del memo[dep]
        else:
            _, v, k = key
            left_key, right_key = deps
            left, right = memo[left_key], memo[right_key]
            h = case_c_step(left, right, prefix_edges(v, k - 1), sizes[children[v][k - 1]] + 1)
            stats.products += 1
            for dk in deps:
                if dk not in capture_keys and dk != ("z",):
                    del memo[dk]
        memo[key] = h
        computed += 1
        _check(ctx, h)
        if key in capture_keys:
            captures[capture_keys[key]] = h
        stack.pop()

    stats.subproblems += computed
    assert computed <= 2 * t.n_edges + t.n_nodes, "subproblem family is not linear"

    result = memo[root_key]
    if capture_root_prefixes is not None:
        # the zero prefix never enters the dependency walk unless needed
        if 0 in capture_root_prefixes and 0 not in captures:
            captures[0] = ctx.zero_matrix()
        return result, captures
    return result


def rooting_distances_from_matrix(s: sm.MatrixHandle, t_edges: int, q_edges: int) -> list[int]:
    """Per-rooting distances read off the full-length windows."""
    out = []
    for i in range(1, 2 * q_edges + 1):
        sim = s.value(i, i + 2 * q_edges)
        out.append(t_edges + q_edges - sim)
    return out


def distances_all_rootings(
    t: LabeledTree, q: LabeledTree, backend: str = "dense"
) -> list[int]:
    """Distances from rooted ``t`` to every rooting of ``q`` (tour order).

    The minimum of the vector is the unrooted distance.
    """
    s = compute_S_cubic(t, q, backend=backend)
    return rooting_distances_from_matrix(s, t.n_edges, q.n_edges)
