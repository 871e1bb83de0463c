"""Gradient-boosted decision trees on logistic loss, built from scratch.

Trees are axis-aligned regression trees fit to first/second-order loss
statistics; leaf values are Newton steps -G/H. Split search is vectorized
across features and uses exact tie-breaking (lowest feature index, then
lowest threshold) so training is deterministic for any worker count or
platform. Per-feature importance is the summed split gain.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

_EPS = 1e-16
FORMAT_VERSION = 1


class ModelError(ValueError):
    pass


@dataclass
class TrainConfig:
    n_trees: int = 200
    max_depth: int = 6
    learning_rate: float = 0.1
    min_samples_leaf: int = 5
    rng_seed: int = 0
    k_folds: int = 10
    test_fraction: float = 0.20

    def __post_init__(self):
        if self.n_trees < 1 or self.max_depth < 1 or self.min_samples_leaf < 1:
            raise ModelError("tree parameters must be positive")
        if self.learning_rate <= 0:
            raise ModelError("learning_rate must be positive")
        if self.k_folds < 2:
            raise ModelError("k_folds must be >= 2")
        if not 0.0 < self.test_fraction < 1.0:
            raise ModelError("test_fraction must be in (0, 1)")


@dataclass
class TreeNode:
    feature: int = -1
    threshold: float = 0.0
    left: "TreeNode | None" = None
    right: "TreeNode | None" = None
    value: float = 0.0
    gain: float = 0.0

    @property
    def is_leaf(self) -> bool:
        return self.left is None


def _best_split(X: np.ndarray, g: np.ndarray, h: np.ndarray,
                min_samples_leaf: int):
    """Best (gain, feature, threshold, left_mask) or None.

    Gain is the Newton objective reduction GL^2/HL + GR^2/HR - G^2/H.
    Equal gains resolve to the lowest feature index, then the lowest
    threshold.
    """
    n = X.shape[0]
    if n < 2 * min_samples_leaf:
        return None
    order = np.argsort(X, axis=0, kind="stable")
    xs = np.take_along_axis(X, order, axis=0)
    gl = np.cumsum(g[order], axis=0)[:-1]
    hl = np.cumsum(h[order], axis=0)[:-1]
    g_tot, h_tot = g.sum(), h.sum()
    gr = g_tot - gl
    hr = h_tot - hl
    gain = gl ** 2 / (hl + _EPS) + gr ** 2 / (hr + _EPS) \
        - g_tot ** 2 / (h_tot + _EPS)
    valid = xs[:-1] < xs[1:]
    counts = np.arange(1, n)[:, None]
    valid &= (counts >= min_samples_leaf) & (n - counts >= min_samples_leaf)
    gain = np.where(valid, gain, -np.inf)
    # feature-major flattening makes argmax break ties toward the lowest
    # feature index, then the lowest split position (= lowest threshold)
    flat = np.ascontiguousarray(gain.T).ravel()
    best = int(np.argmax(flat))
    best_gain = flat[best]
    if not np.isfinite(best_gain) or best_gain <= 0.0:
        return None
    feature, pos = divmod(best, n - 1)
    threshold = float((xs[pos, feature] + xs[pos + 1, feature]) / 2.0)
    left_mask = X[:, feature] <= threshold
    return float(best_gain), int(feature), threshold, left_mask


def _build_tree(X: np.ndarray, g: np.ndarray, h: np.ndarray,
                depth: int, cfg: TrainConfig,
                importance: np.ndarray) -> TreeNode:
    split = None
    if depth < cfg.max_depth:
        split = _best_split(X, g, h, cfg.min_samples_leaf)
    if split is None:
        return TreeNode(value=float(-g.sum() / (h.sum() + _EPS)))
    gain, feature, threshold, left_mask = split
    importance[feature] += gain
    return TreeNode(
        feature=feature, threshold=threshold, gain=gain,
        left=_build_tree(X[left_mask], g[left_mask], h[left_mask],
                         depth + 1, cfg, importance),
        right=_build_tree(X[~left_mask], g[~left_mask], h[~left_mask],
                          depth + 1, cfg, importance),
    )


def _tree_predict(root: TreeNode, X: np.ndarray) -> np.ndarray:
    out = np.empty(X.shape[0], dtype=np.float64)
    stack = [(root, np.arange(X.shape[0]))]
    while stack:
        node, idx = stack.pop()
        if idx.size == 0:
            continue
        if node.is_leaf:
            out[idx] = node.value
        else:
            mask = X[idx, node.feature] <= node.threshold
            stack.append((node.left, idx[mask]))
            stack.append((node.right, idx[~mask]))
    return out


def _sigmoid(x: np.ndarray) -> np.ndarray:
    return 1.0 / (1.0 + np.exp(-x))


def logistic_loss(y: np.ndarray, p: np.ndarray) -> float:
    p = np.clip(p, 1e-12, 1 - 1e-12)
    return float(-np.mean(y * np.log(p) + (1 - y) * np.log(1 - p)))


@dataclass
class TreeEnsemble:
    trees: list[TreeNode]
    learning_rate: float
    initial_score: float
    feature_names: list[str]
    feature_importance: np.ndarray
    loss_history: list[float] = field(default_factory=list)

    @property
    def n_features(self) -> int:
        return len(self.feature_names)


def train_gbdt(X: np.ndarray, y: np.ndarray, feature_names: list[str],
               cfg: TrainConfig) -> TreeEnsemble:
    """Fit a boosted ensemble to fully-imputed features and binary labels."""
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] != y.shape[0]:
        raise ModelError("feature/label shape mismatch")
    if X.shape[1] != len(feature_names):
        raise ModelError("feature name count does not match columns")
    if np.isnan(X).any():
        raise ModelError("training matrix has missing values; impute first")
    classes = np.unique(y)
    if not np.all(np.isin(classes, (0.0, 1.0))):
        raise ModelError("labels must be binary 0/1")
    if classes.size < 2:
        raise ModelError("training set contains a single class")

    p0 = float(y.mean())
    initial = math.log(p0 / (1.0 - p0))
    raw = np.full(y.shape[0], initial)
    importance = np.zeros(X.shape[1], dtype=np.float64)
    trees: list[TreeNode] = []
    losses = [logistic_loss(y, _sigmoid(raw))]
    for _ in range(cfg.n_trees):
        p = _sigmoid(raw)
        g = p - y
        h = p * (1.0 - p)
        tree = _build_tree(X, g, h, 0, cfg, importance)
        trees.append(tree)
        raw = raw + cfg.learning_rate * _tree_predict(tree, X)
        losses.append(logistic_loss(y, _sigmoid(raw)))
    return TreeEnsemble(trees=trees, learning_rate=cfg.learning_rate,
                        initial_score=initial, feature_names=list(feature_names),
                        feature_importance=importance, loss_history=losses)


def predict_scores(ensemble: TreeEnsemble, X: np.ndarray) -> np.ndarray:
    """Positive-class probabilities sigmoid(initial + lr * sum of trees)."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != ensemble.n_features:
        raise ModelError(
            f"expected {ensemble.n_features} columns, got "
            f"{X.shape[1] if X.ndim == 2 else 'non-2d input'}")
    raw = np.full(X.shape[0], ensemble.initial_score)
    for tree in ensemble.trees:
        raw += ensemble.learning_rate * _tree_predict(tree, X)
    return _sigmoid(raw)


def predict_labels(ensemble: TreeEnsemble, X: np.ndarray) -> np.ndarray:
    return (predict_scores(ensemble, X) >= 0.5).astype(np.int64)


def _node_to_json(node: TreeNode) -> dict:
    if node.is_leaf:
        return {"value": node.value}
    return {"feature": node.feature, "threshold": node.threshold,
            "gain": node.gain, "left": _node_to_json(node.left),
            "right": _node_to_json(node.right)}


def _node_from_json(obj: dict) -> TreeNode:
    if "value" in obj:
        return TreeNode(value=float(obj["value"]))
    return TreeNode(feature=int(obj["feature"]),
                    threshold=float(obj["threshold"]),
                    gain=float(obj.get("gain", 0.0)),
                    left=_node_from_json(obj["left"]),
                    right=_node_from_json(obj["right"]))


def save_ensemble(ensemble: TreeEnsemble, path) -> None:
    payload = {
        "format_version": FORMAT_VERSION,
        "learning_rate": ensemble.learning_rate,
        "initial_score": ensemble.initial_score,
        "feature_names": ensemble.feature_names,
        "feature_importance": ensemble.feature_importance.tolist(),
        "loss_history": ensemble.loss_history,
        "trees": [_node_to_json(t) for t in ensemble.trees],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, sort_keys=True)
        fh.write("\n")


def load_ensemble(path) -> TreeEnsemble:
    with open(Path(path), "r", encoding="utf-8") as fh:
        payload = json.load(fh)
    version = payload.get("format_version")
    if version != FORMAT_VERSION:
        raise ModelError(f"unsupported model format version {version!r}")
    return TreeEnsemble(
        trees=[_node_from_json(t) for t in payload["trees"]],
        learning_rate=float(payload["learning_rate"]),
        initial_score=float(payload["initial_score"]),
        feature_names=list(payload["feature_names"]),
        feature_importance=np.array(payload["feature_importance"],
                                    dtype=np.float64),
        loss_history=[float(x) for x in payload.get("loss_history", [])],
    )
