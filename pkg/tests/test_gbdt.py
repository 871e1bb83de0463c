import math

import numpy as np
import pytest

from traitline.gbdt import (ModelError, TrainConfig, TreeEnsemble, TreeNode,
                            load_ensemble, predict_labels, predict_scores,
                            save_ensemble, train_gbdt)


def cfg(**kwargs):
    base = dict(n_trees=10, max_depth=3, learning_rate=0.5,
                min_samples_leaf=2, rng_seed=0)
    base.update(kwargs)
    return TrainConfig(**base)


def separable_data(n_per_side=10):
    x = np.array([[float(i)] for i in range(n_per_side)]
                 + [[float(i + 100)] for i in range(n_per_side)])
    y = np.array([0.0] * n_per_side + [1.0] * n_per_side)
    return x, y


# ---- hand-traced prediction ---------------------------------------------------

def hand_ensemble():
    tree1 = TreeNode(feature=0, threshold=0.5,
                     left=TreeNode(value=-1.0), right=TreeNode(value=2.0))
    tree2 = TreeNode(feature=1, threshold=0.0,
                     left=TreeNode(value=0.5), right=TreeNode(value=-0.25))
    return TreeEnsemble(trees=[tree1, tree2], learning_rate=0.1,
                        initial_score=0.3, feature_names=["f0", "f1"],
                        feature_importance=np.array([1.0, 1.0]))


def sigmoid(x):
    return 1.0 / (1.0 + math.exp(-x))


def test_predict_matches_hand_trace():
    ensemble = hand_ensemble()
    rows = np.array([[0.2, 1.0], [0.7, -3.0]])
    scores = predict_scores(ensemble, rows)
    # row 0: initial 0.3 + 0.1 * (-1.0 - 0.25); row 1: 0.3 + 0.1 * (2.0 + 0.5)
    assert scores[0] == pytest.approx(sigmoid(0.175), abs=1e-12)
    assert scores[1] == pytest.approx(sigmoid(0.55), abs=1e-12)
    assert predict_labels(ensemble, rows).tolist() == [1, 1]


def test_empty_ensemble_predicts_initial_everywhere():
    ensemble = TreeEnsemble(trees=[], learning_rate=0.1, initial_score=-0.4,
                            feature_names=["f0"],
                            feature_importance=np.zeros(1))
    scores = predict_scores(ensemble, np.array([[1.0], [99.0]]))
    assert np.allclose(scores, sigmoid(-0.4))
    assert predict_labels(ensemble, np.array([[0.0]])).tolist() == [0]


def test_prediction_monotone_in_leaf_value():
    low = hand_ensemble()
    high = hand_ensemble()
    high.trees[0].right.value = 5.0
    row = np.array([[0.7, -3.0]])
    assert predict_scores(high, row)[0] > predict_scores(low, row)[0]


def test_predict_rejects_column_mismatch():
    ensemble = hand_ensemble()
    with pytest.raises(ModelError, match="expected 2 columns"):
        predict_scores(ensemble, np.zeros((3, 5)))


# ---- training ------------------------------------------------------------------

def test_separable_data_fits_perfectly():
    x, y = separable_data()
    ensemble = train_gbdt(x, y, ["f0"], cfg())
    assert predict_labels(ensemble, x).tolist() == y.astype(int).tolist()


def test_initial_score_is_base_rate_log_odds():
    x, y = separable_data()
    ensemble = train_gbdt(x, y, ["f0"], cfg(n_trees=1))
    assert ensemble.initial_score == pytest.approx(math.log(1.0), abs=1e-12)
    y_skew = np.array([1.0] * 15 + [0.0] * 5)
    ensemble = train_gbdt(np.zeros((20, 1)), y_skew, ["f0"], cfg(n_trees=1))
    assert ensemble.initial_score == pytest.approx(math.log(0.75 / 0.25),
                                                   abs=1e-12)


def test_constant_features_predict_majority():
    x = np.ones((10, 2))
    y = np.array([1.0] * 7 + [0.0] * 3)
    ensemble = train_gbdt(x, y, ["a", "b"], cfg())
    scores = predict_scores(ensemble, x)
    assert np.allclose(scores, 0.7)
    assert predict_labels(ensemble, x).tolist() == [1] * 10
    assert ensemble.feature_importance.sum() == 0.0


def test_training_loss_non_increasing():
    rng = np.random.default_rng(5)
    x = rng.normal(size=(80, 6))
    y = (x[:, 0] + 0.3 * rng.normal(size=80) > 0).astype(float)
    ensemble = train_gbdt(x, y, [f"f{i}" for i in range(6)],
                          cfg(n_trees=40, learning_rate=0.1))
    losses = ensemble.loss_history
    assert len(losses) == 41
    assert all(b <= a + 1e-12 for a, b in zip(losses, losses[1:]))


def test_training_is_deterministic():
    rng = np.random.default_rng(6)
    x = rng.normal(size=(60, 4))
    y = (x[:, 1] > 0).astype(float)
    a = train_gbdt(x, y, list("abcd"), cfg())
    b = train_gbdt(x, y, list("abcd"), cfg())
    assert np.array_equal(predict_scores(a, x), predict_scores(b, x))
    assert np.array_equal(a.feature_importance, b.feature_importance)


def test_tied_splits_prefer_lowest_feature_index():
    rng = np.random.default_rng(7)
    col = rng.normal(size=(50, 1))
    x = np.hstack([col, col.copy()])  # identical columns -> identical gains
    y = (col[:, 0] > 0).astype(float)
    ensemble = train_gbdt(x, y, ["first", "twin"], cfg(n_trees=5))

    def features_used(node):
        if node.is_leaf:
            return set()
        return ({node.feature} | features_used(node.left)
                | features_used(node.right))

    used = set()
    for tree in ensemble.trees:
        used |= features_used(tree)
    assert used <= {0}
    assert ensemble.feature_importance[1] == 0.0


def test_min_samples_leaf_respected():
    x, y = separable_data(n_per_side=3)
    ensemble = train_gbdt(x, y, ["f0"], cfg(min_samples_leaf=4))
    # 6 rows cannot produce two leaves of 4; every tree is a stump leaf
    assert all(t.is_leaf for t in ensemble.trees)


def test_single_class_rejected():
    with pytest.raises(ModelError, match="single class"):
        train_gbdt(np.zeros((5, 1)), np.ones(5), ["f0"], cfg())


def test_non_binary_labels_rejected():
    with pytest.raises(ModelError, match="binary"):
        train_gbdt(np.zeros((4, 1)), np.array([0.0, 1.0, 2.0, 1.0]),
                   ["f0"], cfg())


def test_missing_values_rejected():
    x = np.array([[1.0], [np.nan]])
    with pytest.raises(ModelError, match="impute"):
        train_gbdt(x, np.array([0.0, 1.0]), ["f0"], cfg())


def test_config_validation():
    with pytest.raises(ModelError):
        TrainConfig(n_trees=0)
    with pytest.raises(ModelError):
        TrainConfig(test_fraction=1.5)
    with pytest.raises(ModelError):
        TrainConfig(learning_rate=0.0)
    with pytest.raises(ModelError):
        TrainConfig(k_folds=1)


# ---- serialization --------------------------------------------------------------

def test_round_trip(tmp_path):
    x, y = separable_data()
    ensemble = train_gbdt(x, y, ["f0"], cfg())
    path = tmp_path / "model.json"
    save_ensemble(ensemble, path)
    back = load_ensemble(path)
    assert back.feature_names == ensemble.feature_names
    assert back.initial_score == ensemble.initial_score
    assert back.learning_rate == ensemble.learning_rate
    assert np.array_equal(back.feature_importance,
                          ensemble.feature_importance)
    assert np.array_equal(predict_scores(back, x),
                          predict_scores(ensemble, x))
    save_ensemble(back, tmp_path / "model2.json")
    assert (tmp_path / "model.json").read_bytes() == \
        (tmp_path / "model2.json").read_bytes()


def test_unsupported_version_rejected(tmp_path):
    path = tmp_path / "model.json"
    path.write_text('{"format_version": 99}')
    with pytest.raises(ModelError, match="format version"):
        load_ensemble(path)
