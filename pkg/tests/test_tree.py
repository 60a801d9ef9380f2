import numpy as np
import pytest

from gazeboost.features import FeatureMatrix
from gazeboost.gbdt import TrainConfig
from gazeboost.gbdt.binning import bin_features
from gazeboost.gbdt.tree import Tree, grow_tree, refine_leaves_mae

from conftest import split_on


def grow(X, g, **cfg):
    m = FeatureMatrix.from_array(X)
    binned = bin_features(m, max_bin=255, min_data_in_bin=1)
    config = TrainConfig(**{"min_data_in_leaf": 1, **cfg})
    tree, leaf_rows = grow_tree(binned, np.asarray(g, float), np.ones(len(g)), config)
    return tree, leaf_rows, binned


def test_two_leaves_is_the_best_stump(rng):
    X = rng.normal(size=(40, 3))
    g = rng.normal(size=40)
    tree, _, _ = grow(X, g, num_leaves=2)
    split, _ = split_on(X, g, np.ones(40), 1)
    assert tree.n_leaves == 2
    assert (tree.column[0], tree.threshold[0]) == (split.column, split.threshold)
    assert tree.gain[0] == pytest.approx(split.gain)


def test_depth_limit(rng):
    X = rng.normal(size=(200, 4))
    tree, _, _ = grow(X, rng.normal(size=200), num_leaves=31, max_depth=2)
    assert tree.max_depth <= 2 and tree.n_leaves <= 4


def test_leaf_budget_and_child_sizes(rng):
    X = rng.normal(size=(300, 5))
    X[rng.random(X.shape) < 0.1] = np.nan
    tree, leaf_rows, binned = grow(X, rng.normal(size=300), num_leaves=9, min_data_in_leaf=12)
    assert tree.n_leaves <= 9
    assert all(len(r) >= 12 for r in leaf_rows.values())
    assert all(tree.gain[i] > 0 for i in range(tree.n_nodes) if tree.left[i] >= 0)
    # the rows recorded per leaf agree with routing
    leaves = tree.apply(binned.codes)
    for leaf, rows in leaf_rows.items():
        assert (leaves[rows] == leaf).all()
    assert sum(len(r) for r in leaf_rows.values()) == 300


def test_leaf_values_are_newton_steps(rng):
    X = rng.normal(size=(60, 2))
    g = rng.normal(size=60)
    tree, leaf_rows, _ = grow(X, g, num_leaves=5)
    for leaf, rows in leaf_rows.items():
        assert tree.value[leaf] == pytest.approx(-g[rows].sum() / len(rows))


def test_four_plateaus_fit_exactly():
    x = np.repeat([0.0, 1.0, 2.0, 3.0], 10)
    y = np.repeat([5.0, -2.0, 7.0, 1.0], 10)
    # rmse gradients at a zero prediction
    tree, _, binned = grow(x[:, None], -y, num_leaves=4)
    assert tree.n_leaves == 4
    assert np.max(np.abs(tree.predict_codes(binned.codes) - y)) < 1e-9


@pytest.mark.parametrize("residuals, expected", [([-1, 0, 9], 0), ([2, 4], 3), ([7], 7)])
def test_refine_leaves_median(residuals, expected):
    tree = Tree()
    tree._add_node(123.0, len(residuals), 0)
    refine_leaves_mae(tree, {0: np.arange(len(residuals))}, np.array(residuals, float))
    assert tree.value[0] == expected


def test_tree_round_trip(rng):
    X = rng.normal(size=(80, 3))
    X[rng.random(X.shape) < 0.2] = np.nan
    tree, _, binned = grow(X, rng.normal(size=80), num_leaves=6)
    again = Tree.from_dict(tree.to_dict())
    np.testing.assert_array_equal(again.predict_codes(binned.codes), tree.predict_codes(binned.codes))
    assert again.to_dict() == tree.to_dict()
