import random

import pytest

from conftest import all_labeled_trees, random_pair

from uted.oracle import (
    SizeGuardError,
    eta,
    exhaustive_similarity,
    rooted_similarity,
    rooted_ted_oracle,
    unrooted_ted_oracle,
)
from uted.trees import Label, enumerate_rootings, parse_tree, random_tree


class TestEta:
    def test_values(self):
        a, b = Label.of("a"), Label.of("b")
        assert eta(a, a) == 2
        assert eta(a, b) == 1

    def test_symmetry(self):
        labels = [Label.of(s) for s in "abcd"]
        for x in labels:
            for y in labels:
                assert eta(x, y) == eta(y, x)

    def test_on_ids(self):
        assert eta(3, 3) == 2 and eta(3, 4) == 1


class TestRootedOracle:
    def test_identical(self):
        for text in ["(a)", "(a (b) (c))", "(root (a) (b (c)))"]:
            assert rooted_ted_oracle(parse_tree(text), parse_tree(text)) == 0

    def test_single_relabel(self):
        assert rooted_ted_oracle(parse_tree("(a)"), parse_tree("(b)")) == 1

    def test_single_contraction(self):
        assert rooted_ted_oracle(parse_tree("(a)"), parse_tree("(root)")) == 1

    def test_order_matters(self):
        t1 = parse_tree("(root (a) (b))")
        t2 = parse_tree("(root (b) (a))")
        assert rooted_ted_oracle(t1, t2) == 2

    def test_nesting_vs_siblings(self):
        t1 = parse_tree("(a (b))")
        t2 = parse_tree("(root (a) (b))")
        assert rooted_ted_oracle(t1, t2) == 2  # contract + split

    def test_matches_exhaustive(self):
        trees = all_labeled_trees(3, ("a", "b"))
        for t1 in trees:
            for t2 in trees:
                sim = exhaustive_similarity(t1, t2)
                assert rooted_ted_oracle(t1, t2) == t1.n_edges + t2.n_edges - sim

    def test_size_guard(self):
        big = random_tree(65, seed=0)
        with pytest.raises(SizeGuardError):
            rooted_ted_oracle(big, big)


class TestExhaustive:
    def test_empty_partner(self):
        t = parse_tree("(a (b))")
        assert exhaustive_similarity(t, parse_tree("(root)")) == 0

    def test_equal_single(self):
        assert exhaustive_similarity(parse_tree("(a)"), parse_tree("(a)")) == 2

    def test_bound(self):
        rng = random.Random(1)
        for _ in range(30):
            t1, t2 = random_pair(rng, 4, alphabet=2)
            sim = exhaustive_similarity(t1, t2)
            assert 0 <= sim <= 2 * min(t1.n_edges, t2.n_edges)

    def test_size_guard(self):
        big = random_tree(6, seed=0)
        with pytest.raises(SizeGuardError):
            exhaustive_similarity(big, big)

    def test_similarity_relation(self):
        rng = random.Random(2)
        for _ in range(30):
            t1, t2 = random_pair(rng, 5, alphabet=2)
            assert rooted_similarity(t1, t2) == exhaustive_similarity(t1, t2)


class TestUnrootedOracle:
    def test_identical(self):
        t = parse_tree("(a (b) (c))")
        assert unrooted_ted_oracle(t, parse_tree("(a (b) (c))")) == 0

    def test_single_edges(self):
        assert unrooted_ted_oracle(parse_tree("(a)"), parse_tree("(b)")) == 1

    def test_rerooted_trees_are_equal(self):
        q = random_tree(6, seed=12)
        for r in enumerate_rootings(q):
            assert unrooted_ted_oracle(q, r) == 0

    def test_symmetry(self):
        rng = random.Random(3)
        for _ in range(20):
            t1, t2 = random_pair(rng, 5)
            assert unrooted_ted_oracle(t1, t2) == unrooted_ted_oracle(t2, t1)

    def test_first_rooting_is_immaterial(self):
        # the minimum over rootings of one side does not depend on how the
        # other side is rooted, validated by full double enumeration
        rng = random.Random(4)
        for _ in range(15):
            t1, t2 = random_pair(rng, 5)
            r2s = enumerate_rootings(t2)
            by_rooting = {
                min(rooted_ted_oracle(r1, r2) for r2 in r2s)
                for r1 in enumerate_rootings(t1)
            }
            assert len(by_rooting) == 1
            assert by_rooting.pop() == unrooted_ted_oracle(t1, t2)

    def test_size_guard(self):
        big = random_tree(33, seed=0)
        with pytest.raises(SizeGuardError):
            unrooted_ted_oracle(big, big)
