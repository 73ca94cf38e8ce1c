import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from uted.trees import (
    LabeledTree,
    Segment,
    TreeParseError,
    compose,
    connected_segment_check,
    enumerate_rootings,
    euler_tour,
    format_tree,
    hang_tree,
    label_text,
    left_tree,
    parse_tree,
    random_tree,
    right_tree,
    rooted_from,
    segment_tree_of,
    subtract,
)


def edge_labels(tree, ids):
    node_of = {tree.edge_id[v]: v for v in range(1, tree.n_nodes)}
    return [label_text(tree.edge_label[node_of[e]]) for e in ids]


class TestParse:
    def test_single_edge(self):
        t = parse_tree("(a)")
        assert t.n_edges == 1 and t.n_nodes == 2

    def test_nested(self):
        t = parse_tree("(a (b) (c))")
        assert t.n_edges == 3
        assert len(t.children[0]) == 1
        top = t.children[0][0]
        assert len(t.children[top]) == 2

    def test_root_form(self):
        t = parse_tree("(root (a) (b))")
        assert t.n_edges == 2 and len(t.children[0]) == 2

    def test_root_form_empty(self):
        t = parse_tree("(root)")
        assert t.n_edges == 0

    @pytest.mark.parametrize("bad", ["()", "((a))", "(a", "a)", "", "(a))", "(a) (b)", "(a-b)"])
    def test_rejects(self, bad):
        with pytest.raises(TreeParseError):
            parse_tree(bad)

    def test_error_position(self):
        with pytest.raises(TreeParseError) as ei:
            parse_tree("(a ()")
        assert ei.value.pos == 4

    def test_whitespace_insensitive(self):
        assert parse_tree("(a(b)(c))") == parse_tree("  ( a ( b )\n( c ) ) ")

    @settings(max_examples=60, deadline=None)
    @given(st.integers(1, 12), st.integers(0, 10**6))
    def test_round_trip(self, n, seed):
        t = random_tree(n, seed=seed)
        assert parse_tree(format_tree(t)) == t

    def test_round_trip_label_named_root(self):
        t = parse_tree("(root (root (a)))")
        assert parse_tree(format_tree(t)) == t


class TestEulerTour:
    def test_path_example(self):
        # u - v - w with edges e1, e2: tour starting down e1 alternates
        p = parse_tree("(e1 (e2))")
        tour = euler_tour(p)
        assert edge_labels(p, tour.walk) == ["e1", "e2", "e2", "e1"] * 2
        assert tour.occ[0] == (1, 4, 5, 8)
        assert tour.occ[1] == (2, 3, 6, 7)

    def test_each_edge_four_times(self):
        for seed in range(8):
            t = random_tree(7, seed=seed)
            tour = euler_tour(t)
            assert len(tour.walk) == 4 * t.n_edges
            assert all(len(p) == 4 for p in tour.occ.values())

    def test_doubling(self):
        t = random_tree(9, seed=1)
        tour = euler_tour(t)
        m2 = 2 * t.n_edges
        assert tour.walk[m2:] == tour.walk[:m2]

    def test_closed_walk_shares_vertices(self):
        t = random_tree(8, seed=3)
        tour = euler_tour(t)
        node_of = {t.edge_id[v]: v for v in range(1, t.n_nodes)}
        for i in range(1, len(tour.walk) + 1):
            v = node_of[tour.walk[i - 1]]
            ends = {t.parent[v], v}
            assert tour.vertex_seq[i - 1] in ends and tour.vertex_seq[i] in ends

    def test_against_recursive_dfs(self):
        # independent construction: recursive DFS over the canonical rooting
        t = random_tree(9, seed=5)

        def dfs(v):
            out = []
            for c in t.children[v]:
                out.append(t.edge_id[c])
                out.extend(dfs(c))
                out.append(t.edge_id[c])
            return out

        tour = euler_tour(t)
        assert list(tour.walk[: 2 * t.n_edges]) == dfs(0)

    def test_any_start_is_a_rotation(self):
        t = random_tree(6, seed=9)
        base = euler_tour(t)
        single = list(base.walk[: 2 * t.n_edges])
        for v in range(1, t.n_nodes):
            for side in (True, False):
                got = list(euler_tour(t, start_edge=v, from_parent_side=side).walk[: 2 * t.n_edges])
                assert any(single[k:] + single[:k] == got for k in range(len(single)))

    def test_empty_tree_rejected(self):
        with pytest.raises(ValueError):
            euler_tour(parse_tree("(root)"))


class TestSegments:
    def test_empty_segment_is_vertex(self):
        p = parse_tree("(e1 (e2))")
        tour = euler_tour(p)
        assert segment_tree_of(p, tour, Segment(3, 3)).n_edges == 0

    def test_path_prefix(self):
        p = parse_tree("(e1 (e2))")
        tour = euler_tour(p)
        assert segment_tree_of(p, tour, Segment(1, 5)) == p

    @pytest.mark.parametrize("text,count", [("(a)", 2), ("(a (b))", 4), ("(root (a) (b) (c))", 6)])
    def test_rooting_counts(self, text, count):
        assert len(enumerate_rootings(parse_tree(text))) == count

    def test_full_windows_enumerate_rootings(self):
        for seed in range(6):
            q = random_tree(6, seed=seed)
            tour = euler_tour(q)
            wins = [segment_tree_of(q, tour, Segment(i, i + 2 * q.n_edges))
                    for i in range(1, 2 * q.n_edges + 1)]
            roots = enumerate_rootings(q)
            assert sorted(w.term() for w in wins) == sorted(r.term() for r in roots)
            assert sorted(tuple(w.edge_id) for w in wins) == sorted(tuple(r.edge_id) for r in roots)

    def test_full_windows_invariant_to_start(self):
        q = random_tree(5, seed=4)
        want = sorted(r.term() for r in enumerate_rootings(q))
        for v in range(1, q.n_nodes):
            for side in (True, False):
                tour = euler_tour(q, start_edge=v, from_parent_side=side)
                wins = [segment_tree_of(q, tour, Segment(i, i + 2 * q.n_edges))
                        for i in range(1, 2 * q.n_edges + 1)]
                assert sorted(w.term() for w in wins) == want

    def test_full_window_occurrences(self):
        q = random_tree(7, seed=2)
        tour = euler_tour(q)
        m2 = 2 * q.n_edges
        for i in range(1, m2 + 1):
            counts = {}
            for p in range(i, i + m2):
                counts[tour.walk[p - 1]] = counts.get(tour.walk[p - 1], 0) + 1
            assert all(c == 2 for c in counts.values()) and len(counts) == q.n_edges

    def test_segment_bounds(self):
        q = random_tree(3, seed=0)
        tour = euler_tour(q)
        with pytest.raises(ValueError):
            segment_tree_of(q, tour, Segment(1, 2 + 2 * q.n_edges))
        with pytest.raises(ValueError):
            segment_tree_of(q, tour, Segment(0, 1))

    def test_connected_check(self):
        q = parse_tree("(a (b) (c))")
        tour = euler_tour(q)
        assert connected_segment_check(q, tour, Segment(2, 2))  # empty
        assert connected_segment_check(q, tour, Segment(1, 1 + 2 * q.n_edges))  # full
        assert not connected_segment_check(q, tour, Segment(1, 2))  # one visit of 'a'

    def test_connected_matches_counting(self):
        q = random_tree(6, seed=8)
        tour = euler_tour(q)
        rng = random.Random(0)
        for _ in range(200):
            l = rng.randint(1, 4 * q.n_edges)
            r = rng.randint(l, min(4 * q.n_edges + 1, l + 2 * q.n_edges))
            counts = {}
            for p in range(l, r):
                counts[tour.walk[p - 1]] = counts.get(tour.walk[p - 1], 0) + 1
            want = all(c != 1 for c in counts.values())
            assert connected_segment_check(q, tour, Segment(l, r)) == want


class TestComposition:
    def test_compose_identity(self):
        t = parse_tree("(a (b))")
        assert compose(parse_tree("(root)"), t) == t
        assert compose(t, parse_tree("(root)")) == t

    def test_compose_order(self):
        c = compose(parse_tree("(a)"), parse_tree("(b)"))
        assert format_tree(c) == "(root (a) (b))"

    def test_compose_associative(self):
        a, b, c = (parse_tree(s) for s in ["(a (x))", "(b)", "(c (y) (z))"])
        assert compose(compose(a, b), c) == compose(a, compose(b, c))

    def test_subtract_all_and_nothing(self):
        t = parse_tree("(a (b) (c))")
        assert subtract(t, t).n_edges == 0
        assert subtract(t, parse_tree("(root)")) == t

    def test_subtract_example(self):
        t = parse_tree("(a (b) (c))")
        cnode = next(v for v in range(1, t.n_nodes) if label_text(t.edge_label[v]) == "c")
        assert subtract(t, hang_tree(t, cnode)) == parse_tree("(a (b))")

    def test_subtract_requires_subset(self):
        with pytest.raises(ValueError):
            subtract(parse_tree("(a)"), parse_tree("(a (b))"))

    def test_subtract_keeps_order(self):
        t = parse_tree("(root (a (p) (q)) (b))")
        anode = next(v for v in range(1, t.n_nodes) if label_text(t.edge_label[v]) == "a")
        # contracting just edge a splices p, q in its place
        only_a = LabeledTree([-1, 0], [[1], []], [-1, t.edge_label[anode]], [-1, t.edge_id[anode]])
        assert format_tree(subtract(t, only_a)) == "(root (p) (q) (b))"

    def test_left_right(self):
        t = parse_tree("(root (a (x)) (b) (c))")
        assert format_tree(left_tree(t)) == "(a (x))"
        assert format_tree(right_tree(t)) == "(c)"
        single = parse_tree("(a (b) (c))")
        assert left_tree(single) == right_tree(single) == single

    def test_left_right_requires_children(self):
        with pytest.raises(ValueError):
            left_tree(parse_tree("(root)"))

    def test_partition_count(self):
        t = parse_tree("(root (a (x)) (b) (c))")
        lt = left_tree(t)
        assert lt.n_edges + subtract(t, lt).n_edges == t.n_edges

    def test_compose_subtract_inverse(self):
        t = parse_tree("(root (a (x) (y)) (b) (c (z)))")
        rt = right_tree(t)
        rest = subtract(t, rt)
        back = compose(rest, rt)
        assert back == t and back.edge_id_set() == t.edge_id_set()


class TestRootings:
    def test_rooted_from_all_vertices(self):
        q = random_tree(6, seed=11)
        for v in range(q.n_nodes):
            order = ([] if v == 0 else [v]) + list(q.children[v])
            for e in order:
                r = rooted_from(q, v, e)
                assert r.n_edges == q.n_edges
                assert r.edge_id_set() == q.edge_id_set()

    def test_generation_shapes(self):
        assert random_tree(5, seed=0, shape="path").n_nodes == 6
        star = random_tree(5, seed=0, shape="star")
        assert len(star.children[0]) == 5
        cat = random_tree(7, seed=0, shape="caterpillar")
        assert cat.n_edges == 7
        assert random_tree(4, seed=9) == random_tree(4, seed=9)
        assert format_tree(random_tree(1, seed=0)).startswith("(x")
