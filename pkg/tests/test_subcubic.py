import io
import random

import pytest

from conftest import random_pair

from uted.cubic import EngineContext, compute_S_cubic
from uted.oracle import eta, rooted_similarity
from uted.simmatrix import NEG_INF, first_valid_mismatch
from uted.subcubic import (
    ConnectedSegment,
    EngineConfig,
    SubcubicStats,
    compute_S_subcubic,
    default_delta,
    flank_matrices,
    hat_decompose,
    restricted_matrices,
    segment_whole,
    transition_census,
    type2,
)
from uted.trees import (
    Segment,
    euler_tour,
    format_tree,
    parse_tree,
    random_tree,
    segment_tree_of,
)


def random_core(rng, seg2, sizes, max_removed):
    """Shrink seg2 by 1..max_removed edges the way the engine would."""
    host = seg2.host
    core = seg2
    removed = 0
    steps = rng.randint(1, 4)
    for _ in range(steps):
        if core.n_edges == 0:
            break
        if core.deg == 1:
            c = host.children[core.v][core.a - 1]
            nxt = ConnectedSegment(host, c, 1, len(host.children[c]), sizes)
        else:
            first = host.children[core.v][core.a - 1]
            last = host.children[core.v][core.b - 1]
            if sizes[first] < sizes[last]:
                nxt = core.replace(core.a + 1, core.b)
            else:
                nxt = core.replace(core.a, core.b - 1)
        if seg2.n_edges - nxt.n_edges > max_removed:
            break
        core = nxt
    return core


class TestDecomposition:
    def test_identity_hat(self):
        t = random_tree(5, seed=1)
        seg = segment_whole(t)
        h = hat_decompose(seg, seg)
        assert h.k == 0
        assert all(not b for b in h.left_blocks) and all(not b for b in h.right_blocks)

    def test_leaf_core_straight_path(self):
        t = parse_tree("(a (b (c)))")
        seg2 = segment_whole(t)
        # walk down to the leaf below c: every level has one child
        v = t.children[0][0]
        while t.children[v]:
            v = t.children[v][0]
        core = ConnectedSegment(t, v, 1, 0)
        h = hat_decompose(seg2, core)
        assert h.k == 3
        assert all(not b for b in h.left_blocks) and all(not b for b in h.right_blocks)

    def test_partition_invariant(self):
        rng = random.Random(2)
        for _ in range(30):
            t = random_tree(rng.randint(2, 10), seed=rng.randrange(1 << 30))
            sizes = t.subtree_edge_count()
            seg2 = segment_whole(t)
            core = random_core(rng, seg2, sizes, max_removed=rng.randint(1, 5))
            h = hat_decompose(seg2, core)  # raises if the partition breaks
            flat = set()
            for blocks in (h.left_blocks, h.right_blocks):
                for block in blocks:
                    for c in block:
                        for u in t.subtree_nodes(c):
                            flat.add(t.edge_id[u])
            flat.update(t.edge_id[w] for w in h.path_nodes)
            assert flat | core.edge_ids() == seg2.edge_ids()
            assert not flat & core.edge_ids()

    def test_containment_violation(self):
        t = parse_tree("(root (a) (b))")
        left = ConnectedSegment(t, 0, 1, 1)
        right = ConnectedSegment(t, 0, 2, 2)
        with pytest.raises(ValueError):
            hat_decompose(left, right)


class TestFlanks:
    def test_flank_prefixes_match_direct_cubic(self):
        rng = random.Random(3)
        for _ in range(8):
            t = random_tree(rng.randint(3, 9), seed=rng.randrange(1 << 30))
            q = random_tree(rng.randint(1, 5), seed=rng.randrange(1 << 30))
            sizes = t.subtree_edge_count()
            seg2 = segment_whole(t)
            core = random_core(rng, seg2, sizes, max_removed=4)
            h = hat_decompose(seg2, core)
            ctx = EngineContext(q)
            left, right = flank_matrices(h, ctx)
            k = h.k
            from uted.subcubic import _compose_blocks

            for i in range(1, k + 2):
                for j in range(i, k + 2):
                    lt, _ = _compose_blocks(t, h.left_blocks[i - 1 : j])
                    want = compute_S_cubic(lt, q, ctx=ctx)
                    assert first_valid_mismatch(left[(i, j)], want) is None
                    rt, _ = _compose_blocks(t, [h.right_blocks[x - 1] for x in range(j, i - 1, -1)])
                    want = compute_S_cubic(rt, q, ctx=ctx)
                    assert first_valid_mismatch(right[(i, j)], want) is None


def brute_restricted(h, x, q, tour, ctx):
    """Definitional restricted matrix of path edge x: force it matched to
    the window's enclosing edge, content inside that edge's inner window."""
    import numpy as np

    side, l = ctx.side, ctx.l
    host = h.host
    w_x = h.path_nodes[x - 1]
    below = ConnectedSegment(host, w_x, 1, len(host.children[w_x])).to_tree()
    lab = host.edge_label[w_x]
    node_of = {q.edge_id[v]: v for v in range(1, q.n_nodes)}
    out = np.full((side + 1, side + 1), NEG_INF, dtype=np.int64)
    for i in range(1, side + 1):
        for j in range(i, min(side, i + l) + 1):
            occ_in = {}
            for p in range(i, j):
                occ_in.setdefault(tour.walk[p - 1], []).append(p)
            best = NEG_INF
            for e, ps in occ_in.items():
                if len(ps) != 2:
                    continue
                lo, ro = ps
                inner = segment_tree_of(q, tour, Segment(lo + 1, ro))
                sim = rooted_similarity(below, inner)
                best = max(best, sim + eta(lab, q.edge_label[node_of[e]]))
            out[i, j] = best
    return out


class TestRestricted:
    def test_matches_definition(self):
        rng = random.Random(4)
        done = 0
        while done < 12:
            t = random_tree(rng.randint(2, 7), seed=rng.randrange(1 << 30), alphabet=2)
            q = random_tree(rng.randint(1, 5), seed=rng.randrange(1 << 30), alphabet=2)
            sizes = t.subtree_edge_count()
            seg2 = segment_whole(t)
            core = random_core(rng, seg2, sizes, max_removed=3)
            h = hat_decompose(seg2, core)
            if h.k == 0:
                continue
            done += 1
            ctx = EngineContext(q)
            tour = ctx.tour
            flanks = flank_matrices(h, ctx)
            s_t1 = compute_S_cubic(core.to_tree(), q, ctx=ctx)
            limit = 2 * (seg2.n_edges - core.n_edges)
            shat = restricted_matrices(h, s_t1, flanks[0], flanks[1], ctx, limit)
            for x in range(1, h.k + 1):
                want = brute_restricted(h, x, q, tour, ctx)
                got = shat[x]
                for i in range(1, ctx.side + 1):
                    for j in range(i, min(ctx.side, i + ctx.l) + 1):
                        assert got.value(i, j) == want[i, j], (x, i, j)

    def test_values_bounded_by_subtree(self):
        rng = random.Random(5)
        t = random_tree(6, seed=8)
        q = random_tree(4, seed=9)
        seg2 = segment_whole(t)
        core = random_core(rng, seg2, t.subtree_edge_count(), max_removed=3)
        h = hat_decompose(seg2, core)
        if h.k:
            ctx = EngineContext(q)
            flanks = flank_matrices(h, ctx)
            s_t1 = compute_S_cubic(core.to_tree(), q, ctx=ctx)
            limit = 2 * (seg2.n_edges - core.n_edges)
            shat = restricted_matrices(h, s_t1, flanks[0], flanks[1], ctx, limit)
            for x, m in shat.items():
                assert m.max_valid() <= 2 * h.sub_edge_count(x)


class TestTypeTwo:
    def test_identity_transition(self):
        t = random_tree(5, seed=10)
        q = random_tree(4, seed=11)
        ctx = EngineContext(q)
        seg = segment_whole(t)
        h = hat_decompose(seg, seg)
        s = compute_S_cubic(t, q, ctx=ctx)
        got = type2(s, h, ctx, EngineConfig())
        assert first_valid_mismatch(got, s) is None

    def test_single_edge_hat_matches_case_b(self):
        # hat = one path edge, no flank subtrees: same as the one-child step
        t = parse_tree("(a (b) (c))")
        q = random_tree(3, seed=12)
        ctx = EngineContext(q)
        top = t.children[0][0]
        core = ConnectedSegment(t, top, 1, len(t.children[top]))
        seg2 = segment_whole(t)
        h = hat_decompose(seg2, core)
        assert h.k == 1
        s_core = compute_S_cubic(core.to_tree(), q, ctx=ctx)
        got = type2(s_core, h, ctx, EngineConfig())
        from uted.cubic import case_b_step

        want = case_b_step(s_core, t.edge_label[top], q, ctx.tour)
        assert first_valid_mismatch(got, want) is None


class TestEngine:
    def test_matches_cubic_over_deltas(self):
        rng = random.Random(6)
        for _ in range(30):
            t, q = random_pair(rng, 8)
            ref = compute_S_cubic(t, q)
            for delta in (1, 2, 3, max(1, t.n_edges)):
                got = compute_S_subcubic(t, q, EngineConfig(delta=delta))
                assert first_valid_mismatch(ref, got) is None, (format_tree(t), format_tree(q), delta)

    def test_huge_delta_single_base_transition(self):
        t = random_tree(6, seed=13)
        q = random_tree(3, seed=14)
        stats = SubcubicStats()
        compute_S_subcubic(t, q, EngineConfig(delta=t.n_edges + 1), stats=stats)
        c = stats.census
        assert c.type1 == 0 and c.type2_base == 1 and c.total() == 1

    def test_removals_disjoint(self):
        rng = random.Random(7)
        for _ in range(10):
            t, q = random_pair(rng, 9)
            stats = SubcubicStats()
            compute_S_subcubic(t, q, EngineConfig(delta=2), stats=stats)
            seen = set()
            for s in stats.removed_edge_sets:
                assert not (seen & s)
                seen |= s
            assert stats.max_removal <= 2 * 2

    def test_law_checks(self):
        rng = random.Random(8)
        t, q = random_pair(rng, 7)
        ctx = EngineContext(q, check_laws=True)
        compute_S_subcubic(t, q, EngineConfig(delta=2), ctx=ctx)
        assert ctx.matrices_checked > 0 and ctx.law_violations == []

    def test_trace_output(self):
        sink = io.StringIO()
        t = random_tree(8, seed=15)
        q = random_tree(4, seed=16)
        compute_S_subcubic(t, q, EngineConfig(delta=2, trace=sink))
        lines = sink.getvalue().strip().split("\n")
        assert lines
        for line in lines:
            kind, sa, sb, d, ms = line.split("\t")
            assert kind in ("type1", "type2_large", "type2_small", "type2_base")
            int(sa), int(sb), int(d), float(ms)

    def test_backends_agree(self):
        rng = random.Random(9)
        t, q = random_pair(rng, 8)
        a = compute_S_subcubic(t, q, EngineConfig(delta=2, backend="dense"))
        b = compute_S_subcubic(t, q, EngineConfig(delta=2, backend="persistent"))
        assert first_valid_mismatch(a, b) is None


class TestCensus:
    def test_huge_delta(self):
        t = random_tree(20, seed=17)
        c = transition_census(t, delta=30)
        assert c.type1 == 0 and c.type2_base == 1 and c.total() == 1

    def test_path_linear(self):
        t = random_tree(64, seed=0, shape="path")
        c = transition_census(t, delta=1)
        assert c.total() <= 2 * 64 + 2

    def test_ratio_stable(self):
        import math

        ratios = []
        for n in (64, 128, 256, 512):
            d = math.isqrt(n)
            for seed in range(4):
                t = random_tree(n, seed=seed)
                c = transition_census(t, delta=d)
                ratios.append(c.total() * d / n)
        assert max(ratios) <= 2 * max(1.0, min(ratios)) or max(ratios) <= 4.0

    def test_default_delta(self):
        assert default_delta(1) == 1
        assert default_delta(27) == 3
        assert default_delta(1000) == 10
