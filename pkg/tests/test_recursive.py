import itertools

import pytest

from tanglegram import (
    RecSplit,
    RecSplitImproved,
    StructureError,
    Tanglegram,
    brute_force,
    count_crossings,
    generate,
    rec_split,
    rec_split_bb,
    rec_split_improved,
    solve_exact,
)
from tanglegram.generators import complete_tree, instance_seed
from tanglegram.recursive import (
    ARRANGEMENTS,
    EdgeClassCounts,
    SubInstance,
    current_level_crossings,
    edge_class_counts,
    shared_leaf_counts,
)

from conftest import caterpillar_instance, identity_instance, random_general_tree, random_instances

SOLVERS = [rec_split, rec_split_improved, rec_split_bb]


def _complete4(right):
    return Tanglegram.from_nested((("a", "b"), ("c", "d")), right)


class TestEdgeClasses:
    def test_aligned_identity(self):
        t = _complete4((("a", "b"), ("c", "d")))
        c = edge_class_counts(t, SubInstance.of(t, t.left.root, t.right.root))
        assert (c.e11, c.e12, c.e21, c.e22) == (2, 0, 0, 2)

    def test_swapped_blocks(self):
        t = _complete4((("c", "d"), ("a", "b")))
        c = edge_class_counts(t, SubInstance.of(t, t.left.root, t.right.root))
        assert (c.e11, c.e12, c.e21, c.e22) == (0, 2, 2, 0)

    def test_leaf_root_rejected(self):
        t = _complete4((("a", "b"), ("c", "d")))
        with pytest.raises(StructureError):
            edge_class_counts(t, SubInstance.of(t, t.left.leaves[0], t.right.root))

    def test_counts_match_membership_enumeration(self):
        for t in random_instances(12, sizes=(8, 16)):
            for u in t.left.internal_nodes[:4]:
                for w in t.right.internal_nodes[:4]:
                    si = SubInstance.of(t, u, w)
                    c = edge_class_counts(t, si)
                    assert c.total == len(si.edges)
                    s1, _ = t.left.children[u]
                    t1, _ = t.right.children[w]
                    brute = {k: 0 for k in itertools.product((1, 2), repeat=2)}
                    for a, b in si.edges:
                        ia = 1 if a in t.left.leaf_sets[s1] else 2
                        ib = 1 if b in t.right.leaf_sets[t1] else 2
                        brute[ia, ib] += 1
                    assert (c.e11, c.e12, c.e21, c.e22) == (brute[1, 1], brute[1, 2], brute[2, 1], brute[2, 2])

    def test_subinstance_edges_are_internal(self):
        t = random_instances(1, sets="C", sizes=(16,))[0]
        u, w = t.left.internal_nodes[1], t.right.internal_nodes[1]
        si = SubInstance.of(t, u, w)
        for a, b in si.edges:
            assert a in t.left.leaf_sets[u] and b in t.right.leaf_sets[w]

    def test_shared_leaf_table_matches_set_intersection(self, rng):
        t = random_instances(1, sets="C", sizes=(20,))[0]
        C = shared_leaf_counts(t)
        for _ in range(50):
            u = int(rng.integers(len(t.left)))
            w = int(rng.integers(len(t.right)))
            mapped = {t.matching[a] for a in t.left.leaf_sets[u]}
            assert C[u, w] == len(mapped & t.right.leaf_sets[w])


class TestCurrentLevel:
    def test_aligned_no_diagonals(self):
        c = EdgeClassCounts(2, 0, 0, 2)
        assert current_level_crossings(c, (False, False)) == 0

    def test_one_flip_crosses_straight_classes(self):
        c = EdgeClassCounts(2, 0, 0, 2)
        assert current_level_crossings(c, (False, True)) == 4
        assert current_level_crossings(c, (True, False)) == 4

    def test_single_crossing_subinstance(self):
        # one edge S1 -> T2 and one S2 -> T1, drawn aligned
        t = Tanglegram.from_nested(("a", "b"), ("b", "a"))
        c = edge_class_counts(t, SubInstance.of(t, t.left.root, t.right.root))
        assert current_level_crossings(c, ARRANGEMENTS[0]) == 1

    def test_current_level_pairs_really_cross(self, rng):
        # for every arrangement the forced pairs cross whatever the lower orders
        for t in random_instances(6, sizes=(8,)):
            c = edge_class_counts(t, SubInstance.of(t, t.left.root, t.right.root))
            s1, s2 = (t.left.leaf_sets[x] for x in t.left.children[t.left.root])
            t1, t2 = (t.right.leaf_sets[x] for x in t.right.children[t.right.root])
            for arr in ARRANGEMENTS:
                left_top = s2 if arr[0] else s1
                right_top = t2 if arr[1] else t1
                n_tb = sum(1 for a in left_top if t.matching[a] not in right_top)
                n_bt = sum(1 for a in t.left.leaves if a not in left_top and t.matching[a] in right_top)
                assert current_level_crossings(c, arr) == n_tb * n_bt


class TestBasics:
    @pytest.mark.parametrize("solver", SOLVERS)
    def test_identity_shapes(self, solver):
        for seed in range(5):
            t = identity_instance(random_general_tree(12 + seed, seed))
            r = solver(t)
            assert r.objective == 0 and r.crossings == 0

    @pytest.mark.parametrize("solver", SOLVERS)
    def test_crossed_pair(self, solver):
        t = Tanglegram.from_nested(("a", "b"), ("b", "a"))
        r = solver(t)
        assert r.crossings == 0
        assert r.orientation.left_flips[t.left.root] != r.orientation.right_flips[t.right.root]

    @pytest.mark.parametrize("solver", SOLVERS)
    def test_reported_crossings_are_recounted(self, solver):
        for t in random_instances(8):
            r = solver(t)
            assert r.crossings == count_crossings(t, r.orientation)
            assert r.objective >= 0
            assert set(r.orientation.left_flips) == set(t.left.internal_nodes)
            assert set(r.orientation.right_flips) == set(t.right.internal_nodes)

    def test_single_leaf(self):
        t = Tanglegram.from_nested("a", "a")
        for solver in SOLVERS:
            assert solver(t).crossings == 0

    def test_recursion_depth_bounded_by_min_height(self):
        for t in random_instances(12, sizes=(16, 32)):
            for solver in SOLVERS:
                assert solver(t).stats["max_depth"] < t.min_height

    def test_complete_identity_reaches_min_height(self):
        labels = [f"x{i}" for i in range(16)]
        t = identity_instance(complete_tree(labels))
        assert rec_split(t).stats["max_depth"] == t.min_height - 1

    def test_deep_caterpillar_does_not_overflow(self):
        t = caterpillar_instance(600)
        assert rec_split_bb(t).stats["visited"] > 0


class TestSeparation:
    def test_unbalanced_reconstruction(self, unbalanced):
        assert rec_split(unbalanced).crossings == 14
        assert rec_split_improved(unbalanced).crossings == 1
        assert brute_force(unbalanced).optimum == 1

    def test_caterpillar_gap_grows(self):
        gaps = []
        for n in range(5, 16):
            t = caterpillar_instance(n)
            assert solve_exact(t, time_limit=30).optimum == 0
            gaps.append(rec_split(t).crossings - rec_split_improved(t).crossings)
        assert all(g > 0 for g in gaps)
        assert all(b > a for a, b in zip(gaps, gaps[1:]))


class TestApproximation:
    def test_complete_eight_leaf_factor_two(self):
        for k in range(20):
            t = generate("A", 8, instance_seed(3, "A", 8, k))
            opt = brute_force(t).optimum
            for solver in (rec_split, rec_split_improved):
                assert solver(t).objective <= 2 * opt

    def test_heuristics_never_beat_optimum(self):
        for t in random_instances(16, sizes=(8, 10)):
            opt = brute_force(t).optimum
            for solver in SOLVERS:
                assert solver(t).crossings >= opt


class TestBranchAndBound:
    def test_identity_has_stats(self):
        t = identity_instance(random_general_tree(20, 1))
        r = rec_split_bb(t)
        assert r.objective == 0 and r.stats["pruned"] >= 0

    def test_matches_exhaustive_on_general_instances(self):
        for k in range(30):
            s, n = "CD"[k % 2], 20 + 10 * (k % 9)
            t = generate(s, n, instance_seed(9, s, n, k))
            assert rec_split_bb(t).objective == rec_split_improved(t).objective

    def test_objective_never_exceeds_layout_crossings(self):
        # every counted pair really crosses in the returned layout
        for t in random_instances(16, sizes=(16, 32)):
            for solver in SOLVERS:
                r = solver(t)
                assert r.objective <= r.crossings

    def test_complete_256(self):
        t = generate("A", 256, instance_seed(0, "A", 256, 0))
        bb = rec_split_bb(t)
        assert bb.objective == rec_split_improved(t).objective
        assert bb.crossings == count_crossings(t, bb.orientation)

    def test_prunes_on_random_instances(self):
        t = generate("C", 60, 4)
        r = rec_split_bb(t)
        assert r.stats["pruned"] > 0
        assert r.stats["visited"] <= rec_split_improved(t).stats["visited"]


class TestEstimators:
    def test_fit_sets_attributes(self):
        t = random_instances(1)[0]
        est = RecSplitImproved().fit(t)
        assert est.crossings_ == count_crossings(t, est.orientation_)
        assert est.n_leaves_ == t.n
        left, right = est.transform(t)
        assert sorted(left) == sorted(right)
        assert est.score(t) == -est.crossings_

    def test_params(self):
        est = RecSplitImproved(branch_and_bound=True)
        assert est.get_params() == {"branch_and_bound": True}
        assert RecSplit().get_params() == {}

    def test_bb_flag_same_objective(self):
        t = random_instances(1, sets="C", sizes=(30,))[0]
        a = RecSplitImproved().fit(t).objective_
        b = RecSplitImproved(branch_and_bound=True).fit(t).objective_
        assert a == b

    def test_accepts_newick_pair(self):
        est = RecSplit().fit(("((a,b),c);", "(c,(a,b));"))
        assert est.crossings_ == 0

    def test_unfitted_transform_raises(self):
        from sklearn.exceptions import NotFittedError

        with pytest.raises(NotFittedError):
            RecSplit().transform(Tanglegram.from_nested(("a", "b"), ("a", "b")))
