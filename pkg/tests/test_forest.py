import numpy as np
import pytest

from datasets import diagonal, one_informative, separable
from disambig.forest import LEAF, RandomForestLinker, build_tree


def brute_vote(tree, x):
    node = 0
    while tree.feature[node] != LEAF:
        if x[tree.feature[node]] <= tree.threshold[node]:
            node = tree.left[node]
        else:
            node = tree.right[node]
    neg, pos = tree.value[node]
    return int(pos > neg)


@pytest.fixture(scope="module")
def sep_forest():
    X, y = separable(200, seed=5)
    return RandomForestLinker(n_estimators=10, random_state=1).fit(X, y), X, y


def test_separable_oob(sep_forest):
    f, X, y = sep_forest
    assert f.oob_error_ <= 0.05
    assert f.oob_error(X, y) == f.oob_error_


def test_minimal_data():
    X = np.array([[0.0] * 26, [1.0] * 26])
    with pytest.warns(UserWarning, match="out-of-bag"):
        f = RandomForestLinker(n_estimators=1, random_state=0).fit(X, [0, 1])
    assert f.estimators_[0].depth >= 1
    assert np.isnan(f.oob_error_)
    assert f.predict(X).tolist() == [0, 1]
    with pytest.raises(ValueError):
        f.oob_error(X, [0, 1])


def test_determinism():
    X, y = separable(150, seed=2)
    a = RandomForestLinker(n_estimators=5, random_state=9).fit(X, y)
    b = RandomForestLinker(n_estimators=5, random_state=9).fit(X, y)
    for ta, tb in zip(a.estimators_, b.estimators_):
        np.testing.assert_array_equal(ta.feature, tb.feature)
        np.testing.assert_array_equal(ta.threshold, tb.threshold)
        np.testing.assert_array_equal(ta.value, tb.value)


def test_threads_match_sequential():
    X, y = separable(150, seed=2)
    a = RandomForestLinker(n_estimators=6, random_state=4).fit(X, y)
    b = RandomForestLinker(n_estimators=6, random_state=4, n_jobs=3).fit(X, y)
    np.testing.assert_array_equal(a.in_bag_, b.in_bag_)
    np.testing.assert_array_equal(a.gini_importance_, b.gini_importance_)
    Xt, _ = separable(100, seed=3)
    np.testing.assert_array_equal(a.predict_votes(Xt), b.predict_votes(Xt))


def test_more_trees_keep_earlier_trees():
    X, y = separable(120, seed=2)
    a = RandomForestLinker(n_estimators=3, random_state=4).fit(X, y)
    b = RandomForestLinker(n_estimators=6, random_state=4).fit(X, y)
    for ta, tb in zip(a.estimators_, b.estimators_):
        np.testing.assert_array_equal(ta.threshold, tb.threshold)


def test_errors():
    X, y = separable(50, seed=1)
    with pytest.raises(ValueError, match="both"):
        RandomForestLinker().fit(X, np.ones(50, dtype=int))
    with pytest.raises(ValueError, match="max_features"):
        RandomForestLinker(max_features=0).fit(X, y)
    with pytest.raises(ValueError, match="max_features"):
        RandomForestLinker(max_features=27).fit(X, y)
    f = RandomForestLinker(n_estimators=2).fit(X, y)
    with pytest.raises(ValueError, match="length"):
        f.predict_votes(np.zeros((1, 25)))


def test_votes_and_distance(sep_forest):
    f, X, _ = sep_forest
    votes = f.predict_votes(X)
    assert np.all(votes.sum(axis=1) == 10)
    d = f.distance(X)
    np.testing.assert_array_equal(d + votes[:, 1] / 10, np.ones(len(X)))
    # a single vector is accepted too
    assert f.predict_votes(X[0]).shape == (1, 2)


def test_pure_leaf_single_tree():
    X = np.zeros((6, 26))
    X[3:, 0] = 1.0
    y = np.array([0, 0, 0, 1, 1, 1])
    f = RandomForestLinker(n_estimators=1, max_features=26, random_state=0).fit(X, y)
    assert f.predict_votes(np.ones(26)).tolist() == [[0, 1]]


def test_deep_negative_point():
    X, y = separable(400, seed=8)
    f = RandomForestLinker(n_estimators=100, random_state=2).fit(X, y)
    deep_negative = np.full(26, 0.5)
    deep_negative[:10] = 0.02
    assert f.predict_votes(deep_negative)[0, 0] >= 90


def test_tree_traversal_matches_brute_force(sep_forest):
    f, X, _ = sep_forest
    rng = np.random.default_rng(0)
    probe = rng.random((50, 26))
    for tree in f.estimators_:
        expected = [brute_vote(tree, x) for x in probe]
        assert tree.vote(probe).tolist() == expected


def test_split_tie_break_prefers_lower_feature():
    # features 2 and 5 are identical perfect splitters
    X = np.zeros((8, 26))
    X[4:, 2] = X[4:, 5] = 1.0
    y = np.array([0] * 4 + [1] * 4)
    tree, imp = build_tree(X, y, np.ones(8), np.ones(8, dtype=int),
                           np.random.default_rng(0), max_features=26)
    assert tree.feature[0] == 2
    assert imp[2] > 0 and imp[5] == 0


def test_gini_importance():
    X, y = one_informative(300, seed=3)
    X[:, 12] = 0.25
    f = RandomForestLinker(n_estimators=20, random_state=1).fit(X, y)
    imp = f.gini_importance_
    assert np.all(imp >= 0)
    assert int(np.argmax(imp)) == 7
    assert np.sum(imp == imp.max()) == 1
    assert imp[12] == 0
    assert f.feature_importances_.sum() == pytest.approx(1.0)


def test_shuffled_labels_oob_near_half():
    X, y = diagonal(600, seed=4)
    y = np.random.default_rng(0).permutation(y)
    f = RandomForestLinker(n_estimators=30, random_state=0).fit(X, y)
    assert abs(f.oob_error_ - 0.5) <= 0.1


def test_oob_tracks_test_error():
    X, y = diagonal(1000, seed=11)
    Xt, yt = diagonal(1000, seed=12)
    f = RandomForestLinker(n_estimators=50, random_state=0).fit(X, y)
    test_error = float(np.mean(f.predict(Xt) != yt))
    assert abs(f.oob_error_ - test_error) <= 0.05


def test_sample_weight_shifts_majority():
    X = np.zeros((4, 26))
    y = np.array([0, 0, 1, 1])
    f = RandomForestLinker(n_estimators=1, random_state=0).fit(X, y, sample_weight=[1, 1, 5, 5])
    # no usable split: the single leaf follows the heavier class
    assert f.predict(X[:1]).tolist() == [1]


def test_sklearn_params():
    f = RandomForestLinker(n_estimators=7, max_features=3)
    assert f.get_params()["n_estimators"] == 7
    f.set_params(max_features=4)
    assert f.max_features == 4
