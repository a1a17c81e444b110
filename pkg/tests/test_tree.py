import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from forestprox.data_model import Dataset
from forestprox.synthgen import get_model, sample
from forestprox.tree import Tree, TreeParams, best_split, grow_tree, tree_prob


def make_data(features, labels, names=None):
    features = np.asarray(features, dtype=np.float64)
    if features.ndim == 1:
        features = features[:, None]
    names = names or tuple(f"f{j}" for j in range(features.shape[1]))
    return Dataset(features, np.asarray(labels), names)


def random_data(rng, n, p):
    return Dataset(
        rng.normal(size=(n, p)),
        rng.integers(0, 2, n),
        tuple(f"f{j}" for j in range(p)),
    )


def leaf_boxes(tree):
    """Explicit (lo, hi] hyper-rectangles per leaf, derived from the split
    structure rather than the routing walk."""
    boxes = []
    stack = [(0, np.full(tree.n_features, -np.inf), np.full(tree.n_features, np.inf))]
    while stack:
        node, lo, hi = stack.pop()
        if tree.feature[node] < 0:
            boxes.append((node, lo, hi))
            continue
        j, thr = int(tree.feature[node]), float(tree.threshold[node])
        hi_left = hi.copy()
        hi_left[j] = min(hi[j], thr)
        lo_right = lo.copy()
        lo_right[j] = max(lo[j], thr)
        stack.append((int(tree.left[node]), lo, hi_left))
        stack.append((int(tree.right[node]), lo_right, hi))
    return boxes


class TestTreeParams:
    def test_validation(self):
        with pytest.raises(ValueError):
            TreeParams(mtry=0)
        with pytest.raises(ValueError):
            TreeParams(mtry=1, min_node_size=0)
        with pytest.raises(ValueError):
            TreeParams(mtry=1, split_mode="surprise")
        with pytest.raises(ValueError):
            TreeParams(mtry=1, criterion="entropy")
        with pytest.raises(ValueError):
            TreeParams(mtry=5).check_dimension(3)


class TestBestSplit:
    def test_two_point_perfect_split(self):
        d = make_data([0.0, 1.0], [0, 1])
        for criterion in ("gini", "mse"):
            s = best_split(np.arange(2), d, [0], criterion)
            assert s.feature == 0
            assert s.threshold == pytest.approx(0.5)
            assert s.score == pytest.approx(0.0)

    def test_pure_node_returns_none(self):
        d = make_data([0.0, 1.0, 2.0], [1, 1, 1])
        assert best_split(np.arange(3), d, [0]) is None

    def test_constant_feature_returns_none(self):
        d = make_data([2.0, 2.0, 2.0], [0, 1, 0])
        assert best_split(np.arange(3), d, [0]) is None

    def test_midpoint_thresholds(self):
        d = make_data([1.0, 2.0, 4.0], [0, 0, 1])
        s = best_split(np.arange(3), d, [0])
        assert s.threshold == pytest.approx(3.0)

    def test_tie_breaks_to_lowest_feature(self):
        x = np.array([0.0, 1.0, 2.0, 3.0])
        d = make_data(np.column_stack([x, x]), [0, 0, 1, 1])
        s = best_split(np.arange(4), d, [0, 1])
        assert s.feature == 0

    def test_tie_breaks_to_lowest_threshold(self):
        # boundaries at 0.5 and 2.5 isolate one point each: exact score tie
        d = make_data([0.0, 1.0, 2.0, 3.0], [1, 0, 0, 1])
        s = best_split(np.arange(4), d, [0])
        assert s.threshold == pytest.approx(0.5)

    def test_sides_nonempty_and_partition(self):
        rng = np.random.default_rng(0)
        d = random_data(rng, 25, 3)
        s = best_split(np.arange(25), d, [0, 1, 2])
        assert len(s.left_rows) > 0 and len(s.right_rows) > 0
        assert sorted(np.concatenate([s.left_rows, s.right_rows]).tolist()) == list(range(25))
        assert (d.features[s.left_rows, s.feature] <= s.threshold).all()
        assert (d.features[s.right_rows, s.feature] > s.threshold).all()

    def test_gini_equals_mse_argmin_on_random_data(self):
        rng = np.random.default_rng(42)
        for _ in range(150):
            n = int(rng.integers(2, 31))
            p = int(rng.integers(1, 5))
            d = random_data(rng, n, p)
            g = best_split(np.arange(n), d, np.arange(p), "gini")
            m = best_split(np.arange(n), d, np.arange(p), "mse")
            if g is None:
                assert m is None
                continue
            assert g.feature == m.feature
            assert g.threshold == m.threshold

    def test_criteria_agree_on_nodes_of_grown_trees(self):
        # replay every internal node of grown trees with both criteria
        # over the full feature set
        rng = np.random.default_rng(23)
        for trial in range(12):
            d = random_data(rng, int(rng.integers(20, 80)), 3)
            t = grow_tree(d, TreeParams(mtry=2, bootstrap=False), seed=trial)
            stack = [(0, np.arange(d.n))]
            while stack:
                node, rows = stack.pop()
                if t.feature[node] < 0:
                    continue
                g = best_split(rows, d, np.arange(3), "gini")
                m = best_split(rows, d, np.arange(3), "mse")
                assert (g.feature, g.threshold) == (m.feature, m.threshold)
                mask = d.features[rows, t.feature[node]] <= t.threshold[node]
                stack.append((int(t.left[node]), rows[mask]))
                stack.append((int(t.right[node]), rows[~mask]))

    def test_gini_equals_mse_with_heavy_ties(self):
        # few distinct values force exact score ties across features
        rng = np.random.default_rng(7)
        for _ in range(150):
            n = int(rng.integers(4, 25))
            p = int(rng.integers(1, 5))
            d = Dataset(
                rng.integers(0, 3, size=(n, p)).astype(float),
                rng.integers(0, 2, n),
                tuple(f"f{j}" for j in range(p)),
            )
            g = best_split(np.arange(n), d, np.arange(p), "gini")
            m = best_split(np.arange(n), d, np.arange(p), "mse")
            if g is None:
                assert m is None
                continue
            assert (g.feature, g.threshold) == (m.feature, m.threshold)

    def test_empty_rows_rejected(self):
        d = make_data([0.0, 1.0], [0, 1])
        with pytest.raises(ValueError):
            best_split(np.array([], dtype=int), d, [0])


class TestGrowTree:
    def test_single_row_gives_single_leaf(self):
        d = make_data([[3.0, 1.0]], [1])
        t = grow_tree(d, TreeParams(mtry=2, bootstrap=False), seed=0)
        assert t.leaf_count == 1
        assert t.leaf_n[0] == 1
        assert t.depth == 0

    def test_deterministic(self):
        d = random_data(np.random.default_rng(1), 60, 4)
        a = grow_tree(d, TreeParams(mtry=2), seed=11)
        b = grow_tree(d, TreeParams(mtry=2), seed=11)
        assert a.to_dict() == b.to_dict()

    def test_different_seeds_differ(self):
        d = random_data(np.random.default_rng(1), 60, 4)
        a = grow_tree(d, TreeParams(mtry=2), seed=11)
        b = grow_tree(d, TreeParams(mtry=2), seed=12)
        assert a.to_dict() != b.to_dict()

    def test_stump_on_halfspace_model(self):
        d = sample(get_model("motivating50"), 1000, seed=3)
        t = grow_tree(
            d, TreeParams(mtry=50, min_node_size=400, bootstrap=False), seed=0
        )
        assert t.feature[0] == 0
        assert abs(t.threshold[0]) < 0.15
        fracs = sorted(
            t.leaf_pos[i] / t.leaf_n[i] for i in range(t.n_nodes) if t.feature[i] < 0
        )
        assert fracs[0] == pytest.approx(0.3, abs=0.06)
        assert fracs[1] == pytest.approx(0.7, abs=0.06)

    def test_max_leaves_budget(self):
        d = random_data(np.random.default_rng(2), 200, 3)
        for budget in (1, 2, 5, 16):
            t = grow_tree(d, TreeParams(mtry=3, max_leaves=budget), seed=5)
            assert t.leaf_count <= budget

    def test_max_leaves_two_gives_stump(self):
        d = random_data(np.random.default_rng(2), 100, 3)
        t = grow_tree(d, TreeParams(mtry=3, max_leaves=2, bootstrap=False), seed=5)
        assert t.leaf_count == 2
        assert t.depth == 1

    def test_every_training_row_reaches_exactly_one_leaf(self):
        rng = np.random.default_rng(3)
        d = random_data(rng, 120, 3)
        t = grow_tree(d, TreeParams(mtry=2, bootstrap=False), seed=9)
        seen = np.concatenate([t.leaf_rows[i] for i in range(t.n_nodes) if t.feature[i] < 0])
        assert sorted(seen.tolist()) == list(range(120))
        leaves = t.apply(d.features)
        for i in np.flatnonzero(t.feature < 0):
            rows = t.leaf_rows[i]
            assert (leaves[rows] == i).all()

    def test_bootstrap_rows_multiset(self):
        rng = np.random.default_rng(4)
        d = random_data(rng, 50, 2)
        t = grow_tree(d, TreeParams(mtry=2, bootstrap=True), seed=9)
        seen = np.concatenate([t.leaf_rows[i] for i in range(t.n_nodes) if t.feature[i] < 0])
        assert len(seen) == 50  # bootstrap keeps the sample size
        assert t.leaf_n.sum() - t.leaf_n[t.feature >= 0].sum() == 50

    def test_partition_property_random_queries(self):
        rng = np.random.default_rng(5)
        d = random_data(rng, 200, 3)
        for mode in ("impurity", "completely_random"):
            t = grow_tree(d, TreeParams(mtry=2, split_mode=mode, bootstrap=False), seed=1)
            queries = rng.uniform(-4, 4, size=(10_000, 3))
            located = t.apply(queries)
            boxes = leaf_boxes(t)
            matches = np.zeros(len(queries), dtype=int)
            box_of = np.full(len(queries), -1)
            for node, lo, hi in boxes:
                inside = ((queries > lo) & (queries <= hi)).all(axis=1)
                matches += inside
                box_of[inside] = node
            assert (matches == 1).all()
            assert (box_of == located).all()

    def test_thresholds_strictly_inside_in_node_range(self):
        rng = np.random.default_rng(6)
        d = random_data(rng, 150, 3)
        for mode in ("impurity", "completely_random"):
            t = grow_tree(d, TreeParams(mtry=3, split_mode=mode, bootstrap=False), seed=2)
            # every internal threshold separates values on both sides
            stack = [(0, np.arange(150))]
            while stack:
                node, rows = stack.pop()
                if t.feature[node] < 0:
                    continue
                vals = d.features[rows, t.feature[node]]
                thr = t.threshold[node]
                assert vals.min() <= thr < vals.max()
                mask = vals <= thr
                assert 0 < mask.sum() < len(rows)
                stack.append((int(t.left[node]), rows[mask]))
                stack.append((int(t.right[node]), rows[~mask]))

    def test_min_node_size_stops_splitting(self):
        rng = np.random.default_rng(7)
        d = random_data(rng, 64, 2)
        t = grow_tree(d, TreeParams(mtry=2, min_node_size=16, bootstrap=False), seed=0)
        # an impure node with >= 2 * min_node_size rows would have split
        for i in np.flatnonzero(t.feature < 0):
            if 0 < t.leaf_pos[i] < t.leaf_n[i]:
                assert t.leaf_n[i] < 32

    def test_completely_random_ignores_mtry_and_uses_range(self):
        rng = np.random.default_rng(8)
        d = random_data(rng, 100, 4)
        t = grow_tree(
            d, TreeParams(mtry=1, split_mode="completely_random", bootstrap=False), seed=3
        )
        assert t.leaf_count > 2
        used = set(int(f) for f in t.feature if f >= 0)
        assert len(used) > 1  # uniform choice touches several features

    def test_leaf_count_decreases_with_mtry_on_average(self):
        d = sample(get_model("motivating50"), 300, seed=12)
        means = {}
        for mtry in (1, 50):
            counts = [
                grow_tree(d, TreeParams(mtry=mtry, min_node_size=1), seed=s).leaf_count
                for s in range(8)
            ]
            means[mtry] = np.mean(counts)
        assert means[50] < means[1]


class TestTreeProb:
    def test_single_leaf_fraction(self):
        d = make_data([1.0, 2.0, 3.0, 4.0], [1, 1, 0, 1])
        t = grow_tree(d, TreeParams(mtry=1, max_leaves=1, bootstrap=False), seed=0)
        assert tree_prob(t, np.array([2.5])) == pytest.approx(0.75)

    def test_training_rows_in_purity_tree_recover_labels(self):
        rng = np.random.default_rng(9)
        d = random_data(rng, 80, 3)
        t = grow_tree(d, TreeParams(mtry=3, min_node_size=1, bootstrap=False), seed=4)
        for i in range(d.n):
            assert tree_prob(t, d.features[i]) == float(d.labels[i])

    def test_hand_built_depth_one_tree(self):
        payload = {
            "seed": 0,
            "n_features": 1,
            "root": {
                "feature": 0,
                "threshold": 0.5,
                "left": {"n": 2, "positives": 1, "rows": [0, 1]},
                "right": {"n": 3, "positives": 3, "rows": [2, 3, 4]},
            },
        }
        t = Tree.from_dict(payload)
        assert tree_prob(t, np.array([0.2])) == pytest.approx(0.5)
        assert tree_prob(t, np.array([0.9])) == pytest.approx(1.0)
        assert t.leaf_count == 2

    def test_dimension_mismatch(self):
        d = make_data([1.0, 2.0], [0, 1])
        t = grow_tree(d, TreeParams(mtry=1, bootstrap=False), seed=0)
        with pytest.raises(ValueError):
            tree_prob(t, np.array([1.0, 2.0]))


class TestSerialization:
    def test_round_trip(self):
        rng = np.random.default_rng(10)
        d = random_data(rng, 90, 3)
        t = grow_tree(d, TreeParams(mtry=2), seed=21)
        back = Tree.from_dict(t.to_dict())
        assert back.to_dict() == t.to_dict()
        queries = rng.normal(size=(50, 3))
        np.testing.assert_array_equal(t.apply(queries), back.apply(queries))


@settings(max_examples=25, deadline=None)
@given(
    n=st.integers(min_value=2, max_value=40),
    p=st.integers(min_value=1, max_value=4),
    seed=st.integers(min_value=0, max_value=10_000),
)
def test_grown_tree_invariants(n, p, seed):
    rng = np.random.default_rng(seed)
    d = Dataset(
        rng.normal(size=(n, p)),
        rng.integers(0, 2, n),
        tuple(f"f{j}" for j in range(p)),
    )
    t = grow_tree(d, TreeParams(mtry=min(2, p), bootstrap=False), seed=seed)
    leaves = np.flatnonzero(t.feature < 0)
    assert (t.leaf_n[leaves] >= 1).all()
    assert (t.leaf_pos[leaves] <= t.leaf_n[leaves]).all()
    assert t.leaf_n[leaves].sum() == n
    assert t.leaf_count == len(leaves)
