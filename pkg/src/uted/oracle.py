"""Ground-truth edit distance and similarity at desk scale.

The rooted oracle is the classical forest edit recursion (contract last
edge on either side, or match the two last edges and recurse into their
subtrees), memoized on canonical forest terms.  It is deliberately
independent of the similarity-matrix machinery so it can referee it.
"""

from __future__ import annotations

from .trees import Label, LabeledTree, enumerate_rootings

__all__ = [
    "SizeGuardError",
    "eta",
    "rooted_ted_oracle",
    "rooted_similarity",
    "exhaustive_similarity",
    "unrooted_ted_oracle",
    "clear_caches",
]

ROOTED_EDGE_LIMIT = 64
UNROOTED_EDGE_LIMIT = 32
EXHAUSTIVE_EDGE_LIMIT = 5


class SizeGuardError(ValueError):
    """An oracle was asked for more than it is sized for."""


def eta(a, b) -> int:
    """Match weight of two edge labels: 2 when equal, 1 otherwise."""
    ai = a.id if isinstance(a, Label) else int(a)
    bi = b.id if isinstance(b, Label) else int(b)
    return 2 if ai == bi else 1


def _term_size(term) -> int:
    # number of edges in a forest term
    total = 0
    stack = list(term)
    while stack:
        _, kids = stack.pop()
        total += 1
        stack.extend(kids)
    return total


_ed_memo: dict = {}
_match_memo: dict = {}


def clear_caches() -> None:
    _ed_memo.clear()
    _match_memo.clear()


def _forest_ed(f1, f2) -> int:
    if not f1:
        return _term_size(f2)
    if not f2:
        return _term_size(f1)
    key = (f1, f2)
    got = _ed_memo.get(key)
    if got is not None:
        return got
    lab1, kids1 = f1[-1]
    lab2, kids2 = f2[-1]
    rest1 = f1[:-1]
    rest2 = f2[:-1]
    best = _forest_ed(rest1 + kids1, f2) + 1
    alt = _forest_ed(f1, rest2 + kids2) + 1
    if alt < best:
        best = alt
    alt = _forest_ed(rest1, rest2) + _forest_ed(kids1, kids2) + (0 if lab1 == lab2 else 1)
    if alt < best:
        best = alt
    _ed_memo[key] = best
    return best


def rooted_ted_oracle(t1: LabeledTree, t2: LabeledTree) -> int:
    """Edit distance between two rooted trees (contract / split / relabel,
    unit cost each)."""
    if t1.n_edges > ROOTED_EDGE_LIMIT or t2.n_edges > ROOTED_EDGE_LIMIT:
        raise SizeGuardError(f"rooted oracle is limited to {ROOTED_EDGE_LIMIT} edges per tree")
    return _forest_ed(t1.term(), t2.term())


def rooted_similarity(t1: LabeledTree, t2: LabeledTree) -> int:
    return t1.n_edges + t2.n_edges - rooted_ted_oracle(t1, t2)


def unrooted_ted_oracle(t1: LabeledTree, t2: LabeledTree) -> int:
    """Minimum rooted distance over all rootings of the second tree.

    The rooting of the first tree is immaterial; tests assert that rather
    than assume it.
    """
    if t1.n_edges > UNROOTED_EDGE_LIMIT or t2.n_edges > UNROOTED_EDGE_LIMIT:
        raise SizeGuardError(f"unrooted oracle is limited to {UNROOTED_EDGE_LIMIT} edges per tree")
    if t2.n_edges < 1:
        return rooted_ted_oracle(t1, t2)
    return min(rooted_ted_oracle(t1, r) for r in enumerate_rootings(t2))


# ---------------------------------------------------------------------------
# exhaustive matcher

# pairwise relation of two edges in one tree
_ANC, _DESC, _LEFT, _RIGHT = 0, 1, 2, 3


def _edge_relations(tree: LabeledTree):
    """Relation matrix over edges (named by child node, preorder listed)."""
    n = tree.n_nodes
    pre = [0] * n
    end = [0] * n
    clock = 0
    stack = [(0, False)]
    while stack:
        v, done = stack.pop()
        if done:
            end[v] = clock
            continue
        clock += 1
        pre[v] = clock
        stack.append((v, True))
        for c in reversed(tree.children[v]):
            stack.append((c, False))
    nodes = [v for v in range(1, n)]
    idx = {v: k for k, v in enumerate(nodes)}
    k = len(nodes)
    rel = [[0] * k for _ in range(k)]
    for a in nodes:
        for b in nodes:
            if a == b:
                continue
            if pre[a] < pre[b] <= end[a]:
                r = _ANC
            elif pre[b] < pre[a] <= end[b]:
                r = _DESC
            elif end[a] < pre[b]:
                r = _LEFT
            else:
                r = _RIGHT
            rel[idx[a]][idx[b]] = r
    labels = [tree.edge_label[v] for v in nodes]
    return rel, labels


def exhaustive_similarity(t1: LabeledTree, t2: LabeledTree) -> int:
    """Heaviest structure-respecting edge matching, found by enumeration.

    Every injective edge map preserving the pairwise ancestor/descendant/
    left/right relation is explored with incremental pruning.  This is the
    definitional check for the DP oracles, so it must stay an enumeration.
    """
    if t1.n_edges > EXHAUSTIVE_EDGE_LIMIT or t2.n_edges > EXHAUSTIVE_EDGE_LIMIT:
        raise SizeGuardError(
            f"exhaustive matcher is limited to {EXHAUSTIVE_EDGE_LIMIT} edges per tree"
        )
    k1, k2 = t1.term(), t2.term()
    key = (k1, k2) if k1 <= k2 else (k2, k1)
    got = _match_memo.get(key)
    if got is not None:
        return got

    rel1, labels1 = _edge_relations(t1)
    rel2, labels2 = _edge_relations(t2)
    n1, n2 = len(labels1), len(labels2)
    used = [False] * n2
    chosen: list[tuple[int, int]] = []
    best = 0

    def weight(a: int, b: int) -> int:
        return 2 if labels1[a] == labels2[b] else 1

    def walk(a: int, acc: int):
        nonlocal best
        if acc + 2 * min(n1 - a, n2) <= best:
            return
        if a == n1:
            if acc > best:
                best = acc
            return
        walk(a + 1, acc)  # leave edge a unmatched
        for b in range(n2):
            if used[b]:
                continue
            ok = True
            for (pa, pb) in chosen:
                if rel1[pa][a] != rel2[pb][b]:
                    ok = False
                    break
            if ok:
                used[b] = True
                chosen.append((a, b))
                walk(a + 1, acc + weight(a, b))
                chosen.pop()
                used[b] = False

    walk(0, 0)
    _match_memo[key] = best
    return best
