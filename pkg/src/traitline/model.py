"""Classification protocol: imputation, stratified splits, evaluation,
baselines, feature importance and the F1 growth curve.

All imputation and any other statistics are fit on the training partition
only and then applied unchanged to held-out rows.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .features import FeatureMatrix
from .gbdt import (ModelError, TrainConfig, TreeEnsemble, predict_labels,
                   train_gbdt)


@dataclass(frozen=True)
class Metrics:
    precision: float
    recall: float
    f1: float
    tp: int
    fp: int
    tn: int
    fn: int

    def as_dict(self) -> dict:
        return {"precision": self.precision, "recall": self.recall,
                "f1": self.f1, "confusion": {"tp": self.tp, "fp": self.fp,
                                             "tn": self.tn, "fn": self.fn}}


class Imputer:
    """Per-column fill values learned from a training matrix.

    Columns whose observed values are all in {0, 1} are treated as
    binary/categorical and filled with the training mode (ties toward the
    smaller value); every other column is filled with the training mean.
    """

    def __init__(self):
        self.columns: list[str] = []
        self.fill: np.ndarray | None = None

    def fit(self, matrix: FeatureMatrix) -> "Imputer":
        self.columns = list(matrix.columns)
        fill = np.empty(len(self.columns), dtype=np.float64)
        for j, name in enumerate(self.columns):
            col = matrix.values[:, j]
            observed = col[~np.isnan(col)]
            if observed.size == 0:
                raise ModelError(
                    f"column {name!r} has no observed values in the "
                    f"training partition")
            if np.all(np.isin(observed, (0.0, 1.0))):
                values, counts = np.unique(observed, return_counts=True)
                fill[j] = values[np.argmax(counts)]  # first max = smaller value
            else:
                fill[j] = observed.mean()
        self.fill = fill
        return self

    def transform(self, matrix: FeatureMatrix) -> FeatureMatrix:
        if self.fill is None:
            raise ModelError("imputer not fitted")
        if list(matrix.columns) != self.columns:
            raise ModelError("imputer was fitted on different columns")
        values = matrix.values.copy()
        nan_rows, nan_cols = np.where(np.isnan(values))
        values[nan_rows, nan_cols] = self.fill[nan_cols]
        return FeatureMatrix(columns=list(matrix.columns),
                             user_ids=list(matrix.user_ids),
                             labels=matrix.labels.copy(), values=values)


def impute(train: FeatureMatrix,
           test: FeatureMatrix | None = None):
    """Impute train (and optionally test) with statistics fit on train."""
    imputer = Imputer().fit(train)
    if test is None:
        return imputer.transform(train)
    return imputer.transform(train), imputer.transform(test)


def _class_indices(labels: np.ndarray) -> dict[int, np.ndarray]:
    return {int(c): np.where(labels == c)[0] for c in np.unique(labels)}


def stratified_split(matrix: FeatureMatrix, test_fraction: float,
                     rng_seed: int) -> tuple[FeatureMatrix, FeatureMatrix]:
    """Deterministic class-preserving train/test split."""
    if not 0.0 < test_fraction < 1.0:
        raise ModelError("test_fraction must be in (0, 1)")
    by_class = _class_indices(matrix.labels)
    if len(by_class) < 2:
        raise ModelError("both classes must be present to split")
    rng = np.random.default_rng(rng_seed)
    test_idx: list[np.ndarray] = []
    train_idx: list[np.ndarray] = []
    for label in sorted(by_class):
        idx = by_class[label]
        if idx.size < 2:
            raise ModelError(f"class {label} has fewer than 2 rows")
        n_test = int(round(idx.size * test_fraction))
        n_test = min(max(n_test, 1), idx.size - 1)
        shuffled = rng.permutation(idx)
        test_idx.append(shuffled[:n_test])
        train_idx.append(shuffled[n_test:])
    train = matrix.select_rows(np.sort(np.concatenate(train_idx)))
    test = matrix.select_rows(np.sort(np.concatenate(test_idx)))
    return train, test


def stratified_kfold(matrix: FeatureMatrix, k: int,
                     rng_seed: int) -> list[tuple[np.ndarray, np.ndarray]]:
    """k (train_indices, test_indices) pairs; folds partition the rows."""
    if k < 2:
        raise ModelError("k must be >= 2")
    by_class = _class_indices(matrix.labels)
    rng = np.random.default_rng(rng_seed)
    folds: list[list[int]] = [[] for _ in range(k)]
    for label in sorted(by_class):
        idx = by_class[label]
        if idx.size < k:
            raise ModelError(f"class {label} has fewer than k={k} rows")
        shuffled = rng.permutation(idx)
        for i, row in enumerate(shuffled):
            folds[i % k].append(int(row))
    all_rows = np.arange(matrix.n_rows)
    out = []
    for fold in folds:
        test = np.sort(np.array(fold, dtype=np.int64))
        train = np.setdiff1d(all_rows, test)
        out.append((train, test))
    return out


def evaluate(predicted: np.ndarray, truth: np.ndarray) -> Metrics:
    """Precision/recall/F1 for the positive (engaged=1) class."""
    predicted = np.asarray(predicted, dtype=np.int64)
    truth = np.asarray(truth, dtype=np.int64)
    if predicted.size == 0:
        raise ModelError("cannot evaluate empty predictions")
    if predicted.shape != truth.shape:
        raise ModelError("prediction/truth length mismatch")
    tp = int(np.sum((predicted == 1) & (truth == 1)))
    fp = int(np.sum((predicted == 1) & (truth == 0)))
    tn = int(np.sum((predicted == 0) & (truth == 0)))
    fn = int(np.sum((predicted == 0) & (truth == 1)))
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f1 = (2 * precision * recall / (precision + recall)
          if precision + recall else 0.0)
    return Metrics(precision=precision, recall=recall, f1=f1,
                   tp=tp, fp=fp, tn=tn, fn=fn)


def baseline_majority(train: FeatureMatrix, test: FeatureMatrix) -> Metrics:
    """Constant predictor of the most frequent training label (tie -> 1)."""
    n_pos = int(np.sum(train.labels == 1))
    n_neg = int(np.sum(train.labels == 0))
    label = 1 if n_pos >= n_neg else 0
    return evaluate(np.full(test.n_rows, label, dtype=np.int64), test.labels)


def baseline_random(test: FeatureMatrix, rng_seed: int) -> Metrics:
    rng = np.random.default_rng(rng_seed)
    return evaluate(rng.integers(0, 2, size=test.n_rows), test.labels)


def train_on_matrix(train: FeatureMatrix, cfg: TrainConfig) -> TreeEnsemble:
    return train_gbdt(train.values, train.labels.astype(np.float64),
                      train.columns, cfg)


def evaluate_model(ensemble: TreeEnsemble, test: FeatureMatrix) -> Metrics:
    return evaluate(predict_labels(ensemble, test.values), test.labels)


def cross_validate(matrix: FeatureMatrix, cfg: TrainConfig) -> list[Metrics]:
    """Stratified k-fold metrics; imputation refit inside every fold."""
    results = []
    for train_idx, test_idx in stratified_kfold(matrix, cfg.k_folds,
                                                cfg.rng_seed):
        train, test = impute(matrix.select_rows(train_idx),
                             matrix.select_rows(test_idx))
        ensemble = train_on_matrix(train, cfg)
        results.append(evaluate_model(ensemble, test))
    return results


def feature_report(ensemble: TreeEnsemble,
                   top_n: int | None = None) -> list[tuple[str, float]]:
    """Features ranked by split-gain importance, normalized to sum 1."""
    if not ensemble.trees:
        raise ModelError("ensemble has no trees")
    total = float(ensemble.feature_importance.sum())
    if total <= 0.0:
        raise ModelError("ensemble has no splits; importance undefined")
    shares = ensemble.feature_importance / total
    ranked = sorted(zip(ensemble.feature_names, shares),
                    key=lambda kv: (-kv[1], kv[0]))
    if top_n is not None:
        ranked = ranked[:top_n]
    return [(name, float(share)) for name, share in ranked]


def importance_ranking(ensemble: TreeEnsemble) -> list[str]:
    return [name for name, _ in feature_report(ensemble)]


def f1_growth_curve(matrix: FeatureMatrix, ranking: list[str],
                    cfg: TrainConfig,
                    ks: list[int] | None = None) -> list[tuple[int, float]]:
    """Holdout F1 after retraining on the top-k ranked features.

    Every point reuses the same split seed and training config, so the
    point at k = all columns reproduces the full model exactly.
    """
    missing = set(matrix.columns) - set(ranking)
    if missing:
        raise ModelError(
            f"ranking does not cover column {sorted(missing)[0]!r}")
    if ks is None:
        ks = list(range(1, len(ranking) + 1))
    curve = []
    for k in ks:
        if not 1 <= k <= len(ranking):
            raise ModelError(f"curve point k={k} out of range")
        top = set(ranking[:k])
        # keep the matrix column order so k = all rebuilds the full model
        # bit-for-bit (split tie-breaking depends on column position)
        sub = matrix.select_columns([c for c in matrix.columns if c in top])
        train, test = stratified_split(sub, cfg.test_fraction, cfg.rng_seed)
        train, test = impute(train, test)
        ensemble = train_on_matrix(train, cfg)
        curve.append((k, evaluate_model(ensemble, test).f1))
    return curve
