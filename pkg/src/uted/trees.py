"""Ordered edge-labeled trees: parsing, tours, segments and composition.

Trees are stored in rooted form (node 0 is the root, every other node owns
the edge to its parent) but carry enough ordering information to act as
unrooted trees: the cyclic order of edges around a vertex is the parent
edge followed by the child edges in left-to-right order.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

__all__ = [
    "Label",
    "LabeledTree",
    "EulerTour",
    "Segment",
    "TreeParseError",
    "intern_label",
    "label_text",
    "parse_tree",
    "format_tree",
    "build_tree",
    "euler_tour",
    "segment_tree_of",
    "connected_segment_check",
    "enumerate_rootings",
    "rooted_from",
    "compose",
    "subtract",
    "left_tree",
    "right_tree",
    "hang_tree",
    "random_tree",
]

ROOT_FORM = "root"

# Global intern table: equal label strings map to equal integer ids across
# all trees, which is what makes cross-tree label comparison a plain ==.
_LABEL_IDS: dict[str, int] = {}
_LABEL_TEXT: list[str] = []


def intern_label(text: str) -> int:
    """Return the dense integer id for a label string, creating it if new."""
    lid = _LABEL_IDS.get(text)
    if lid is None:
        lid = len(_LABEL_TEXT)
        _LABEL_IDS[text] = lid
        _LABEL_TEXT.append(text)
    return lid


def label_text(lid: int) -> str:
    return _LABEL_TEXT[lid]


@dataclass(frozen=True)
class Label:
    """An interned alphabet symbol; equality is id equality."""

    id: int

    @classmethod
    def of(cls, text: str) -> "Label":
        return cls(intern_label(text))

    @property
    def text(self) -> str:
        return label_text(self.id)


class TreeParseError(ValueError):
    """Raised on malformed tree text; carries the offending position."""

    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} (at position {pos})")
        self.pos = pos


class LabeledTree:
    """Immutable rooted ordered tree with labels on edges.

    Every node except the root owns its parent edge; ``edge_label[v]`` and
    ``edge_id[v]`` describe that edge.  ``edge_id`` ties derived trees
    (segments, flanks, subtractions) back to the edges of the tree they
    were carved from; trees built from text get fresh ids 0..m-1 in
    parse order.
    """

    __slots__ = ("parent", "children", "edge_label", "edge_id", "_term", "_hash")

    def __init__(
        self,
        parent: Sequence[int],
        children: Sequence[Sequence[int]],
        edge_label: Sequence[int],
        edge_id: Sequence[int],
    ):
        self.parent = tuple(parent)
        self.children = tuple(tuple(c) for c in children)
        self.edge_label = tuple(edge_label)
        self.edge_id = tuple(edge_id)
        self._term = None
        self._hash = None

    @property
    def n_nodes(self) -> int:
        return len(self.parent)

    @property
    def n_edges(self) -> int:
        return len(self.parent) - 1

    def root_degree(self) -> int:
        return len(self.children[0])

    def edge_id_set(self) -> frozenset:
        return frozenset(self.edge_id[1:])

    def term(self):
        """Canonical nested-tuple form keyed by labels (edge ids ignored).

        A node's term is ``(label, (child terms...))``; the tree's term is
        the tuple of the root's child terms.  Used for structural equality
        and as a memoization key.
        """
        if self._term is None:
            terms: list = [None] * self.n_nodes
            stack = [(0, False)]
            while stack:
                v, done = stack.pop()
                if done:
                    kids = tuple(terms[c] for c in self.children[v])
                    terms[v] = kids if v == 0 else (self.edge_label[v], kids)
                else:
                    stack.append((v, True))
                    for c in self.children[v]:
                        stack.append((c, False))
            self._term = terms[0]
        return self._term

    def __eq__(self, other):
        if not isinstance(other, LabeledTree):
            return NotImplemented
        return self.term() == other.term()

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.term())
        return self._hash

    def __repr__(self):
        return f"LabeledTree({format_tree(self)!r})"

    def subtree_nodes(self, v: int) -> list[int]:
        """Nodes of the subtree rooted at v, in preorder."""
        out = []
        stack = [v]
        while stack:
            u = stack.pop()
            out.append(u)
            for c in reversed(self.children[u]):
                stack.append(c)
        return out

    def subtree_edge_count(self) -> list[int]:
        """Per node, the number of edges strictly inside its subtree."""
        size = [0] * self.n_nodes
        order = self.subtree_nodes(0)
        for v in reversed(order):
            size[v] = sum(size[c] + 1 for c in self.children[v])
        return size


def build_tree(edges: Iterable[tuple[int, int, str]], root: int = 0) -> LabeledTree:
    """Assemble a tree from ``(parent, child, label)`` triples.

    Child order follows the order the triples are listed in; edge ids
    follow the same order.  Vertex ids must form 0..n-1 with ``root``
    present.
    """
    triples = list(edges)
    n = len(triples) + 1
    kids: list[list[tuple[int, int, str]]] = [[] for _ in range(n)]
    for eid, (p, c, lab) in enumerate(triples):
        kids[p].append((c, eid, lab))
    # renumber so the root becomes node 0 and ids follow preorder
    parent = [-1]
    children: list[list[int]] = [[]]
    edge_label = [-1]
    edge_id = [-1]
    remap = {root: 0}
    todo = [(root, iter(kids[root]))]
    while todo:
        old, it = todo[-1]
        nxt = next(it, None)
        if nxt is None:
            todo.pop()
            continue
        c, eid, lab = nxt
        new = len(parent)
        remap[c] = new
        children[remap[old]].append(new)
        parent.append(remap[old])
        children.append([])
        edge_label.append(intern_label(lab))
        edge_id.append(eid)
        todo.append((c, iter(kids[c])))
    return LabeledTree(parent, children, edge_label, edge_id)


# ---------------------------------------------------------------------------
# text format


def _tokenize(text: str):
    tokens = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
        elif ch in "()":
            tokens.append((ch, i))
            i += 1
        elif ch.isalnum() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append((text[i:j], i))
            i = j
        else:
            raise TreeParseError(f"unexpected character {ch!r}", i)
    return tokens


def parse_tree(text: str) -> LabeledTree:
    """Parse the parenthesized tree format.

    Each group is ``(label children...)`` and denotes an edge (to its
    parent) plus the subtree below it.  The outermost group is the edge
    to a virtual root, except for the reserved top-level form
    ``(root child...)`` which denotes a rooted tree with those children.
    """
    tokens = _tokenize(text)
    if not tokens:
        raise TreeParseError("empty input", 0)

    parent = [-1]
    children: list[list[int]] = [[]]
    edge_label = [-1]
    edge_id = [-1]

    pos = 0

    def tok():
        return tokens[pos] if pos < len(tokens) else (None, len(text))

    t, at = tok()
    if t != "(":
        raise TreeParseError("expected '('", at)
    pos += 1
    t, at = tok()
    if t in (None, "(", ")"):
        raise TreeParseError("expected a label after '('", at)
    top_is_root_form = t == ROOT_FORM

    # rewind and parse iteratively with an explicit stack of open groups
    pos = 0
    stack: list[int] = []  # node ids of open groups
    depth_done = False
    while pos < len(tokens):
        t, at = tok()
        if depth_done:
            raise TreeParseError("trailing input after tree", at)
        if t == "(":
            pos += 1
            lt, lat = tok()
            if lt in (None, "(", ")"):
                raise TreeParseError("expected a label after '('", lat)
            pos += 1
            if not stack and top_is_root_form:
                stack.append(0)  # the reserved form labels the root itself
                continue
            p = stack[-1] if stack else 0
            v = len(parent)
            parent.append(p)
            children[p].append(v)
            children.append([])
            edge_label.append(intern_label(lt))
            edge_id.append(len(edge_id) - 1)
            stack.append(v)
        elif t == ")":
            if not stack:
                raise TreeParseError("unbalanced ')'", at)
            stack.pop()
            pos += 1
            if not stack:
                depth_done = True
        else:
            raise TreeParseError(f"unexpected token {t!r}", at)
    if stack:
        raise TreeParseError("unbalanced '(': missing ')'", len(text))
    if not depth_done:
        raise TreeParseError("expected a tree", 0)
    return LabeledTree(parent, children, edge_label, edge_id)


def format_tree(tree: LabeledTree) -> str:
    """Serialize to the text format; inverse of :func:`parse_tree`."""
    parts: list[str] = []

    def emit(v: int):
        stack = [(v, False)]
        while stack:
            u, done = stack.pop()
            if done:
                parts.append(")")
                continue
            parts.append("(" + label_text(tree.edge_label[u]))
            stack.append((u, True))
            for c in reversed(tree.children[u]):
                stack.append((c, False))

    kids = tree.children[0]
    if len(kids) == 1 and label_text(tree.edge_label[kids[0]]) != ROOT_FORM:
        emit(kids[0])
    else:
        parts.append("(" + ROOT_FORM)
        for c in kids:
            emit(c)
        parts.append(")")
    out = [parts[0]]
    for p in parts[1:]:
        if p != ")":
            out.append(" ")
        out.append(p)
    return "".join(out)


# ---------------------------------------------------------------------------
# Euler tours and segments


class EulerTour:
    """Doubled closed walk over a tree's edges.

    ``walk`` holds 4m edge ids (the 2m-long tour repeated twice) and
    ``occ[e]`` the four 1-based positions of edge ``e``.  ``vertex_seq``
    has 4m+1 entries: position i of the walk moves from ``vertex_seq[i-1]``
    to ``vertex_seq[i]``.
    """

    __slots__ = ("walk", "occ", "vertex_seq", "n_edges")

    def __init__(self, walk, occ, vertex_seq):
        self.walk = tuple(walk)
        self.occ = {e: tuple(p) for e, p in occ.items()}
        self.vertex_seq = tuple(vertex_seq)
        self.n_edges = len(walk) // 4

    def __len__(self):
        return len(self.walk)


def _cyclic_orders(tree: LabeledTree) -> list[list[int]]:
    """Edges around each vertex: parent edge first, then children in order.

    Edges are named by their child node id.
    """
    orders: list[list[int]] = []
    for v in range(tree.n_nodes):
        at = [] if v == 0 else [v]
        at.extend(tree.children[v])
        orders.append(at)
    return orders


def rooted_from(tree: LabeledTree, root_vertex: int, first_edge_node: int) -> LabeledTree:
    """Re-root the unrooted view of ``tree`` at a vertex and first edge.

    ``first_edge_node`` names the edge (by its child node in the stored
    rooting) that becomes the root's first child edge.  The children of
    every other vertex are its remaining neighbors in cyclic order
    starting after the arrival edge.
    """
    orders = _cyclic_orders(tree)
    order0 = orders[root_vertex]
    k0 = order0.index(first_edge_node)
    start_order = order0[k0:] + order0[:k0]

    parent = [-1]
    children: list[list[int]] = [[]]
    edge_label = [-1]
    edge_id = [-1]
    # entries: (original vertex, arrival edge node or None, new node id, edges to follow)
    todo = [(root_vertex, None, 0, iter(start_order))]
    while todo:
        old_v, arrival, new_v, it = todo[-1]
        edge_node = next(it, None)
        if edge_node is None:
            todo.pop()
            continue
        if edge_node == arrival:
            continue
        if edge_node == old_v:
            w = tree.parent[old_v]
        else:
            w = edge_node
        nv = len(parent)
        parent.append(new_v)
        children[new_v].append(nv)
        children.append([])
        edge_label.append(tree.edge_label[edge_node])
        edge_id.append(tree.edge_id[edge_node])
        w_order = orders[w]
        k = w_order.index(edge_node)
        rotated = w_order[k + 1 :] + w_order[:k]
        todo.append((w, edge_node, nv, iter(rotated)))
    return LabeledTree(parent, children, edge_label, edge_id)


def enumerate_rootings(tree: LabeledTree) -> list[LabeledTree]:
    """All 2(n-1) rootings of the unrooted view, duplicates included."""
    if tree.n_edges < 1:
        raise ValueError("rooting enumeration needs at least one edge")
    out = []
    orders = _cyclic_orders(tree)
    for v in range(tree.n_nodes):
        for edge_node in orders[v]:
            out.append(rooted_from(tree, v, edge_node))
    return out


def euler_tour(
    tree: LabeledTree,
    start_edge: Optional[int] = None,
    from_parent_side: bool = True,
) -> EulerTour:
    """Doubled Euler tour of the unrooted view of ``tree``.

    The walk starts by traversing ``start_edge`` (named by its child node;
    default: the root's first child edge) from its parent side, then
    repeatedly leaves each vertex by the cyclic successor of the arrival
    edge.  The result is the 2m-long tour written twice; entries are host
    edge ids.
    """
    if tree.n_edges < 1:
        raise ValueError("euler tour needs at least one edge")
    m = tree.n_edges
    if len(set(tree.edge_id[1:])) != m:
        raise ValueError("tree edges must carry distinct ids to be toured")
    if start_edge is None:
        start_edge = tree.children[0][0]
    root_vertex = tree.parent[start_edge] if from_parent_side else start_edge

    orders = _cyclic_orders(tree)
    succ: list[dict[int, int]] = []
    for order in orders:
        d = len(order)
        succ.append({order[i]: order[(i + 1) % d] for i in range(d)})

    walk_nodes: list[int] = []
    vseq: list[int] = [root_vertex]
    v = root_vertex
    e = start_edge
    for _ in range(2 * m):
        w = tree.parent[v] if e == v else e
        walk_nodes.append(e)
        vseq.append(w)
        v = w
        e = succ[v][e]
    if v != root_vertex:
        raise AssertionError("tour did not close")

    walk = [tree.edge_id[x] for x in walk_nodes]
    walk = walk + walk
    vseq = vseq + vseq[1:]
    occ: dict[int, list[int]] = {}
    for i, eid in enumerate(walk, start=1):
        occ.setdefault(eid, []).append(i)
    for eid, positions in occ.items():
        if len(positions) != 4:
            raise AssertionError(f"edge {eid} occurs {len(positions)} times in the walk")
    return EulerTour(walk, occ, vseq)


@dataclass(frozen=True)
class Segment:
    """Half-open 1-based window [l, r) into a doubled tour."""

    l: int
    r: int

    def validate(self, n_edges: int) -> "Segment":
        if not (1 <= self.l <= self.r <= 4 * n_edges + 1):
            raise ValueError(f"segment {self} out of range for {n_edges} edges")
        if self.r - self.l > 2 * n_edges:
            raise ValueError(f"segment {self} longer than half the walk")
        return self

    def __len__(self):
        return self.r - self.l


def _window_counts(tour: EulerTour, seg: Segment) -> dict[int, int]:
    counts: dict[int, int] = {}
    for i in range(seg.l, seg.r):
        e = tour.walk[i - 1]
        counts[e] = counts.get(e, 0) + 1
    return counts


def segment_tree_of(tree: LabeledTree, tour: EulerTour, seg: Segment) -> LabeledTree:
    """The rooted tree a tour window denotes.

    Edges occurring fewer than twice in the window are contracted; the
    first surviving edge roots the result.
    """
    seg.validate(tree.n_edges)
    counts = _window_counts(tour, seg)
    surviving = {e for e, c in counts.items() if c >= 2}

    parent = [-1]
    children: list[list[int]] = [[]]
    edge_label = [-1]
    edge_id = [-1]
    eid_to_node = {tree.edge_id[v]: v for v in range(1, tree.n_nodes)}
    stack = [0]
    seen: dict[int, int] = {}
    for i in range(seg.l, seg.r):
        e = tour.walk[i - 1]
        if e not in surviving:
            continue
        seen[e] = seen.get(e, 0) + 1
        if seen[e] == 1:
            v = len(parent)
            p = stack[-1]
            parent.append(p)
            children[p].append(v)
            children.append([])
            node = eid_to_node[e]
            edge_label.append(tree.edge_label[node])
            edge_id.append(e)
            stack.append(v)
        else:
            stack.pop()
            if not stack:
                raise AssertionError("segment walk is not properly nested")
    if len(stack) != 1:
        raise AssertionError("segment walk is not properly nested")
    return LabeledTree(parent, children, edge_label, edge_id)


def connected_segment_check(tree: LabeledTree, tour: EulerTour, seg: Segment) -> bool:
    """True iff no edge occurs exactly once in the window."""
    seg.validate(tree.n_edges)
    return all(c != 1 for c in _window_counts(tour, seg).values())


# ---------------------------------------------------------------------------
# composition operators


def compose(t1: LabeledTree, t2: LabeledTree) -> LabeledTree:
    """Merge the roots; t1's children end up to the left of t2's."""
    parent = [-1]
    children: list[list[int]] = [[]]
    edge_label = [-1]
    edge_id = [-1]

    def append_tree(t: LabeledTree):
        offset = len(parent) - 1
        for v in range(1, t.n_nodes):
            p = t.parent[v]
            np = 0 if p == 0 else p + offset
            parent.append(np)
            children[np].append(v + offset)
            children.append([])
            edge_label.append(t.edge_label[v])
            edge_id.append(t.edge_id[v])

    append_tree(t1)
    append_tree(t2)
    return LabeledTree(parent, children, edge_label, edge_id)


def subtract(t2: LabeledTree, t1: LabeledTree) -> LabeledTree:
    """Contract every edge of ``t1`` inside ``t2`` (matched by edge id)."""
    gone = t1.edge_id_set()
    if not gone <= t2.edge_id_set():
        raise ValueError("subtraction operand is not an edge subset")
    parent = [-1]
    children: list[list[int]] = [[]]
    edge_label = [-1]
    edge_id = [-1]
    # new node for every surviving edge; contracted nodes collapse upward
    new_of = {0: 0}
    todo = [(0, iter(t2.children[0]))]
    while todo:
        v, it = todo[-1]
        c = next(it, None)
        if c is None:
            todo.pop()
            continue
        if t2.edge_id[c] in gone:
            new_of[c] = new_of[v]
        else:
            nv = len(parent)
            new_of[c] = nv
            p = new_of[v]
            parent.append(p)
            children[p].append(nv)
            children.append([])
            edge_label.append(t2.edge_label[c])
            edge_id.append(t2.edge_id[c])
        todo.append((c, iter(t2.children[c])))
    return LabeledTree(parent, children, edge_label, edge_id)


def hang_tree(tree: LabeledTree, top: int) -> LabeledTree:
    """Subtree of node ``top`` together with its parent edge."""
    parent = [-1]
    children: list[list[int]] = [[]]
    edge_label = [-1]
    edge_id = [-1]
    new_of = {}
    order = tree.subtree_nodes(top)
    for v in order:
        nv = len(parent)
        new_of[v] = nv
        p = 0 if v == top else new_of[tree.parent[v]]
        parent.append(p)
        children[p].append(nv)
        children.append([])
        edge_label.append(tree.edge_label[v])
        edge_id.append(tree.edge_id[v])
    return LabeledTree(parent, children, edge_label, edge_id)


def left_tree(tree: LabeledTree) -> LabeledTree:
    """First child's subtree plus the edge to the root."""
    if not tree.children[0]:
        raise ValueError("root has no children")
    return hang_tree(tree, tree.children[0][0])


def right_tree(tree: LabeledTree) -> LabeledTree:
    """Last child's subtree plus the edge to the root."""
    if not tree.children[0]:
        raise ValueError("root has no children")
    return hang_tree(tree, tree.children[0][-1])


# ---------------------------------------------------------------------------
# generation


def random_tree(
    n_edges: int,
    seed: int = 0,
    shape: str = "random",
    alphabet: int = 4,
) -> LabeledTree:
    """Deterministic random tree with ``n_edges`` edges.

    Shapes: ``random`` (random attachment at a random child position),
    ``path``, ``star``, ``caterpillar``.
    """
    if n_edges < 1:
        raise ValueError("need at least one edge")
    if alphabet < 1:
        raise ValueError("alphabet must be positive")
    rng = random.Random(seed)

    def lab() -> str:
        return f"x{rng.randrange(alphabet)}"

    parent = [-1]
    children: list[list[int]] = [[]]
    edge_label = [-1]
    edge_id = [-1]

    def attach(p: int, position: Optional[int] = None) -> int:
        v = len(parent)
        parent.append(p)
        if position is None:
            children[p].append(v)
        else:
            children[p].insert(position, v)
        children.append([])
        edge_label.append(intern_label(lab()))
        edge_id.append(v - 1)
        return v

    if shape == "path":
        at = 0
        for _ in range(n_edges):
            at = attach(at)
    elif shape == "star":
        for _ in range(n_edges):
            attach(0)
    elif shape == "caterpillar":
        spine = 0
        for k in range(n_edges):
            if k % 2 == 0:
                spine = attach(spine)
            else:
                attach(parent[spine])
    elif shape == "random":
        for _ in range(n_edges):
            p = rng.randrange(len(parent))
            attach(p, rng.randint(0, len(children[p])))
    else:
        raise ValueError(f"unknown shape {shape!r}")
    return LabeledTree(parent, children, edge_label, edge_id)
