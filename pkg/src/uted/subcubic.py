"""Block-decomposed similarity engine.

Grows the similarity matrix of T over connected segments (a vertex plus a
contiguous child interval) using two transition kinds: merging two
segments of at least the block size via a matrix product, and extending a
segment by a bounded "hat" (a path up from its root plus the sibling
flanks hanging off that path).  The hat transition routes forced matches
of the path edges through restricted matrices so a whole O(delta)-sized
extension costs a handful of probing passes instead of a full product
per edge.
"""

from __future__ import annotations

import sys
import time
from dataclasses import dataclass, field
from typing import Optional, TextIO

from . import simmatrix as sm
from ._kernel import kernel
from .cubic import EngineContext, compute_S_cubic
from .trees import LabeledTree

__all__ = [
    "EngineConfig",
    "TransitionCensus",
    "SubcubicStats",
    "ConnectedSegment",
    "HatDecomposition",
    "segment_whole",
    "hat_decompose",
    "flank_matrices",
    "restricted_matrices",
    "type1",
    "type2",
    "compute_S_subcubic",
    "transition_census",
    "default_delta",
]


def default_delta(t_edges: int) -> int:
    """Block size balancing the product and probing costs of the naive
    bounded-difference backend (probing grows like delta^3 per block)."""
    return max(1, round(t_edges ** (1.0 / 3.0)))


@dataclass
class EngineConfig:
    """Knobs of the decomposed engine.

    ``delta`` defaults to the cube-root policy; ``seed`` is forwarded to
    randomized product backends (the naive backend ignores it).
    """

    delta: Optional[int] = None
    bd_backend: str = "naive"
    backend: str = "dense"
    count_transitions: bool = True
    check_laws: bool = False
    trace: Optional[TextIO] = None
    seed: Optional[int] = None


@dataclass
class TransitionCensus:
    type1: int = 0
    type2_large: int = 0
    type2_small: int = 0
    type2_base: int = 0

    def total(self) -> int:
        return self.type1 + self.type2_large + self.type2_small + self.type2_base

    def as_dict(self) -> dict:
        return {
            "type1": self.type1,
            "type2_large": self.type2_large,
            "type2_small": self.type2_small,
            "type2_base": self.type2_base,
        }


@dataclass
class SubcubicStats:
    census: TransitionCensus = field(default_factory=TransitionCensus)
    removed_edge_sets: list = field(default_factory=list)
    max_removal: int = 0


class ConnectedSegment:
    """A vertex of the host tree plus a contiguous child interval.

    Children positions are 1-based and the interval is inclusive;
    ``a = b + 1`` denotes the empty segment at that vertex.
    """

    __slots__ = ("host", "v", "a", "b", "_sizes")

    def __init__(self, host: LabeledTree, v: int, a: int, b: int, _sizes=None):
        deg = len(host.children[v])
        if not (1 <= a and b <= deg and a <= b + 1):
            raise ValueError(f"bad child interval [{a}, {b}] at vertex {v} (degree {deg})")
        self.host = host
        self.v = v
        self.a = a
        self.b = b
        self._sizes = _sizes if _sizes is not None else host.subtree_edge_count()

    @property
    def deg(self) -> int:
        return self.b - self.a + 1

    @property
    def n_edges(self) -> int:
        return sum(self._sizes[c] + 1 for c in self.child_nodes())

    def child_nodes(self) -> list[int]:
        return list(self.host.children[self.v][self.a - 1 : self.b])

    def replace(self, a: int, b: int) -> "ConnectedSegment":
        return ConnectedSegment(self.host, self.v, a, b, self._sizes)

    def edge_ids(self) -> frozenset:
        ids = []
        for c in self.child_nodes():
            for u in self.host.subtree_nodes(c):
                ids.append(self.host.edge_id[u])
        return frozenset(ids)

    def to_tree(self) -> LabeledTree:
        return _compose_blocks(self.host, [self.child_nodes()])[0]

    def __repr__(self):
        return f"ConnectedSegment(v={self.v}, [{self.a}, {self.b}])"


def segment_whole(t: LabeledTree) -> ConnectedSegment:
    return ConnectedSegment(t, 0, 1, len(t.children[0]))


def _compose_blocks(host: LabeledTree, blocks: list[list[int]]):
    """Tree whose root children are the listed subtrees, block by block.

    Returns the tree and the cumulative root-child count after each block
    (the capture cuts for prefix batching).
    """
    parent = [-1]
    children: list[list[int]] = [[]]
    edge_label = [-1]
    edge_id = [-1]
    cuts = []
    count = 0
    for block in blocks:
        for top in block:
            count += 1
            new_of = {}
            for u in host.subtree_nodes(top):
                nv = len(parent)
                new_of[u] = nv
                p = 0 if u == top else new_of[host.parent[u]]
                parent.append(p)
                children[p].append(nv)
                children.append([])
                edge_label.append(host.edge_label[u])
                edge_id.append(host.edge_id[u])
        cuts.append(count)
    return LabeledTree(parent, children, edge_label, edge_id), cuts


@dataclass
class HatDecomposition:
    """Path from the grown segment's root down to the core's root, with
    the sibling flanks hanging left and right of it.

    ``path_nodes[i]`` is the child node of path edge i+1 (top-down);
    ``left_blocks``/``right_blocks`` have k+1 entries of child nodes.
    """

    host: LabeledTree
    seg2: ConnectedSegment
    seg1: ConnectedSegment
    path_nodes: list[int]
    left_blocks: list[list[int]]
    right_blocks: list[list[int]]

    @property
    def k(self) -> int:
        return len(self.path_nodes)

    def path_labels(self) -> list[int]:
        return [self.host.edge_label[w] for w in self.path_nodes]

    def block_edges(self, blocks: list[list[int]]) -> int:
        sizes = self.host.subtree_edge_count()
        return sum(sizes[c] + 1 for block in blocks for c in block)

    def sub_edge_count(self, x: int) -> int:
        """Edges of the subtree hanging from path edge x (1-based),
        including the edge itself."""
        below = self.block_edges(self.left_blocks[x:]) + self.block_edges(self.right_blocks[x:])
        return 1 + (self.k - x) + below + self.seg1.n_edges


def hat_decompose(seg2: ConnectedSegment, seg1: ConnectedSegment) -> HatDecomposition:
    """Split ``seg2`` into ``seg1``, the root path between them, and the
    per-level left/right flanks."""
    host = seg2.host
    if seg1.host is not host:
        raise ValueError("segments live in different hosts")
    children = host.children

    chain = [seg1.v]
    while chain[-1] != seg2.v:
        p = host.parent[chain[-1]]
        if p < 0:
            raise ValueError("grown segment's root is not an ancestor of the core's root")
        chain.append(p)
    chain.reverse()  # seg2.v .. seg1.v
    path_nodes = chain[1:]
    k = len(path_nodes)

    def positions(v: int, node: int) -> int:
        return children[v].index(node) + 1

    left_blocks: list[list[int]] = []
    right_blocks: list[list[int]] = []
    if k == 0:
        if not (seg2.a <= seg1.a and seg1.b <= seg2.b):
            raise ValueError("core interval is not inside the grown interval")
        left_blocks.append(list(children[seg2.v][seg2.a - 1 : seg1.a - 1]))
        right_blocks.append(list(children[seg2.v][seg1.b : seg2.b]))
    else:
        pos1 = positions(seg2.v, path_nodes[0])
        if not (seg2.a <= pos1 <= seg2.b):
            raise ValueError("path leaves the grown segment's child interval")
        left_blocks.append(list(children[seg2.v][seg2.a - 1 : pos1 - 1]))
        right_blocks.append(list(children[seg2.v][pos1 : seg2.b]))
        for i in range(1, k):
            w = path_nodes[i - 1]
            pos = positions(w, path_nodes[i])
            left_blocks.append(list(children[w][: pos - 1]))
            right_blocks.append(list(children[w][pos:]))
        left_blocks.append(list(children[seg1.v][: seg1.a - 1]))
        right_blocks.append(list(children[seg1.v][seg1.b :]))

    h = HatDecomposition(host, seg2, seg1, path_nodes, left_blocks, right_blocks)
    total = h.block_edges(left_blocks) + h.block_edges(right_blocks) + k + seg1.n_edges
    if total != seg2.n_edges:
        raise AssertionError("hat decomposition does not partition the segment's edges")
    return h


def flank_matrices(h: HatDecomposition, ctx: EngineContext):
    """Similarity matrices of every flank prefix, batched per anchor.

    Returns (left, right) dicts keyed by (i, j), 1 <= i <= j <= k+1:
    ``left[(i, j)]`` covers blocks i..j left of the path, ``right[(i, j)]``
    blocks j..i right of it (right flanks compose outward-in).  One cubic
    run per anchor serves all its prefixes.
    """
    k = h.k
    left: dict = {}
    right: dict = {}
    for i in range(1, k + 2):
        tree, cuts = _compose_blocks(h.host, h.left_blocks[i - 1 :])
        _, captures = compute_S_cubic(
            tree, ctx.q, ctx=ctx, capture_root_prefixes=sorted(set(cuts))
        )
        for off, j in enumerate(range(i, k + 2)):
            left[(i, j)] = captures[cuts[off]]
    for j in range(1, k + 2):
        blocks = [h.right_blocks[t - 1] for t in range(j, 0, -1)]  # R_j, ..., R_1
        tree, cuts = _compose_blocks(h.host, blocks)
        _, captures = compute_S_cubic(
            tree, ctx.q, ctx=ctx, capture_root_prefixes=sorted(set(cuts))
        )
        for off, i in enumerate(range(j, 0, -1)):
            right[(i, j)] = captures[cuts[off]]
    return left, right


def restricted_matrices(
    h: HatDecomposition,
    s_t1: sm.MatrixHandle,
    flanks_left: dict,
    flanks_right: dict,
    ctx: EngineContext,
    limit: int,
) -> dict[int, sm.MatrixHandle]:
    """Restricted matrices of the path edges, deepest first.

    The restricted matrix of path edge x forces that edge to match the
    window's enclosing edge; its content is either the core below the
    whole remaining path (no deeper path edge matched) or hands off to
    the restricted matrix of the first deeper matched path edge.
    """
    k = h.k
    labels = h.path_labels()
    out: dict[int, sm.MatrixHandle] = {}
    for x in range(k, 0, -1):
        passes = [
            (
                flanks_left[(x + 1, k + 1)].raw(),
                flanks_right[(x + 1, k + 1)].raw(),
                s_t1.raw(),
            )
        ]
        for y in range(x + 1, k + 1):
            passes.append(
                (
                    flanks_left[(x + 1, y)].raw(),
                    flanks_right[(x + 1, y)].raw(),
                    out[y].raw(),
                )
            )
        raw = kernel.restricted_kernel(
            ctx.side, ctx.l, ctx.occ, ctx.eta_row(labels[x - 1]), limit, passes
        )
        out[x] = sm.from_raw(raw, ctx.backend, h.sub_edge_count(x))
    return out


def type1(
    s_left: sm.MatrixHandle,
    s_right: sm.MatrixHandle,
    cfg: EngineConfig,
    delta: int = 1,
) -> sm.MatrixHandle:
    """Merge transition: product of two segment matrices."""
    for side_name, s in (("left", s_left), ("right", s_right)):
        if s.t_edges is not None and s.t_edges < delta:
            raise AssertionError(f"{side_name} merge operand smaller than the block size")
    return sm.star_similarity(s_left, s_right, cfg.bd_backend, seed=cfg.seed)


def type2(
    s_t1: sm.MatrixHandle,
    h: HatDecomposition,
    ctx: EngineContext,
    cfg: EngineConfig,
    flanks=None,
) -> sm.MatrixHandle:
    """Hat transition: grow S(core) to the matrix of the hat-extended
    segment.

    Initialization covers matchings using no path edge (flanks star core
    star flanks); the probing passes then fold in every choice of first
    matched path edge through its restricted matrix.
    """
    k = h.k
    if flanks is None:
        flanks = flank_matrices(h, ctx)
    flanks_left, flanks_right = flanks
    limit = 2 * (h.seg2.n_edges - h.seg1.n_edges)

    init = sm.star_similarity(
        sm.star_similarity(flanks_left[(1, k + 1)], s_t1, cfg.bd_backend, seed=cfg.seed),
        flanks_right[(1, k + 1)],
        cfg.bd_backend,
        seed=cfg.seed,
    )
    if k == 0:
        return init.with_t_edges(h.seg2.n_edges)

    shat = restricted_matrices(h, s_t1, flanks_left, flanks_right, ctx, limit)
    passes = [
        (flanks_left[(1, x)].raw(), flanks_right[(1, x)].raw(), shat[x].raw())
        for x in range(1, k + 1)
    ]
    raw = kernel.hat_apply_kernel(init.raw(), ctx.l, ctx.occ, limit, passes)
    return sm.from_raw(raw, ctx.backend, h.seg2.n_edges)


def _shrink(seg: ConnectedSegment, sizes: list[int], delta: int) -> ConnectedSegment:
    """The core segment a hat transition starts from: peel root edges and
    smaller flanks until the next peel would remove more than 2*delta
    edges in total (or nothing is left)."""
    host = seg.host
    start_edges = seg.n_edges
    tp = seg
    while True:
        if tp.deg == 0:
            tnext = tp
        elif tp.deg == 1:
            c = host.children[tp.v][tp.a - 1]
            tnext = ConnectedSegment(host, c, 1, len(host.children[c]), sizes)
        else:
            first = host.children[tp.v][tp.a - 1]
            last = host.children[tp.v][tp.b - 1]
            if sizes[first] + 1 < sizes[last] + 1:
                tnext = tp.replace(tp.a + 1, tp.b)
            else:
                tnext = tp.replace(tp.a, tp.b - 1)
        if start_edges - tnext.n_edges > 2 * delta or tp.n_edges == 0:
            return tp
        tp = tnext


class _Driver:
    def __init__(self, t: LabeledTree, ctx: EngineContext, cfg: EngineConfig, stats: SubcubicStats):
        self.t = t
        self.ctx = ctx
        self.cfg = cfg
        self.stats = stats
        self.sizes = t.subtree_edge_count()
        self.delta = cfg.delta if cfg.delta is not None else default_delta(t.n_edges)
        if self.delta < 1:
            raise ValueError("delta must be at least 1")

    def _trace(self, kind: str, size_a: int, size_b: int, elapsed: float):
        if self.cfg.trace is not None:
            self.cfg.trace.write(
                f"{kind}\t{size_a}\t{size_b}\t{self.delta}\t{elapsed * 1000:.3f}\n"
            )

    def _law_check(self, handle: sm.MatrixHandle):
        if self.ctx.check_laws:
            self.ctx.matrices_checked += 1
            self.ctx.law_violations.extend(sm.check_similarity_laws(handle))

    def compute(self, seg: ConnectedSegment) -> sm.MatrixHandle:
        if seg.n_edges == 0:
            return self.ctx.zero_matrix()
        sizes = self.sizes
        host = seg.host
        if seg.deg >= 2:
            first = host.children[seg.v][seg.a - 1]
            last = host.children[seg.v][seg.b - 1]
            size_l = sizes[first] + 1
            size_r = sizes[last] + 1
            if size_l >= self.delta and size_r >= self.delta:
                left = self.compute(seg.replace(seg.a, seg.b - 1))
                right = self.compute(seg.replace(seg.b, seg.b))
                began = time.perf_counter()
                s = type1(left, right, self.cfg, self.delta)
                self.stats.census.type1 += 1
                self._trace("type1", left.t_edges or 0, right.t_edges or 0, time.perf_counter() - began)
                self._law_check(s)
                return s.with_t_edges(seg.n_edges)

        core = _shrink(seg, sizes, self.delta)
        removed = seg.n_edges - core.n_edges
        if removed > 2 * self.delta:
            raise AssertionError("hat larger than the removal budget")
        s_core = self.compute(core)
        began = time.perf_counter()
        h = hat_decompose(seg, core)
        s = type2(s_core, h, self.ctx, self.cfg)
        if core.n_edges == 0:
            self.stats.census.type2_base += 1
            kind = "type2_base"
        elif removed >= self.delta:
            self.stats.census.type2_large += 1
            kind = "type2_large"
        else:
            self.stats.census.type2_small += 1
            kind = "type2_small"
        self.stats.max_removal = max(self.stats.max_removal, removed)
        self.stats.removed_edge_sets.append(seg.edge_ids() - core.edge_ids())
        self._trace(kind, seg.n_edges, core.n_edges, time.perf_counter() - began)
        self._law_check(s)
        return s


def compute_S_subcubic(
    t: LabeledTree,
    q: LabeledTree,
    cfg: Optional[EngineConfig] = None,
    stats: Optional[SubcubicStats] = None,
    ctx: Optional[EngineContext] = None,
) -> sm.MatrixHandle:
    """Similarity matrix of rooted ``t`` against all tour windows of ``q``
    using the block decomposition; agrees with the cubic engine on every
    valid cell."""
    if cfg is None:
        cfg = EngineConfig()
    if stats is None:
        stats = SubcubicStats()
    if ctx is None:
        ctx = EngineContext(q, backend=cfg.backend, check_laws=cfg.check_laws)
    driver = _Driver(t, ctx, cfg, stats)
    limit = 10000 + 4 * t.n_nodes
    if sys.getrecursionlimit() < limit:
        sys.setrecursionlimit(limit)
    return driver.compute(segment_whole(t))


def transition_census(t: LabeledTree, delta: Optional[int] = None) -> TransitionCensus:
    """Dry run of the decomposition: transition counts only, no matrices."""
    sizes = t.subtree_edge_count()
    d = delta if delta is not None else default_delta(t.n_edges)
    if d < 1:
        raise ValueError("delta must be at least 1")
    census = TransitionCensus()
    limit = 10000 + 4 * t.n_nodes
    if sys.getrecursionlimit() < limit:
        sys.setrecursionlimit(limit)

    def walk(seg: ConnectedSegment):
        if seg.n_edges == 0:
            return
        if seg.deg >= 2:
            first = t.children[seg.v][seg.a - 1]
            last = t.children[seg.v][seg.b - 1]
            if sizes[first] + 1 >= d and sizes[last] + 1 >= d:
                walk(seg.replace(seg.a, seg.b - 1))
                walk(seg.replace(seg.b, seg.b))
                census.type1 += 1
                return
        core = _shrink(seg, sizes, d)
        removed = seg.n_edges - core.n_edges
        walk(core)
        if core.n_edges == 0:
            census.type2_base += 1
        elif removed >= d:
            census.type2_large += 1
        else:
            census.type2_small += 1

    walk(segment_whole(t))
    return census
