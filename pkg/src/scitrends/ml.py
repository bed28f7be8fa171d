"""Self-contained binary-classification kernel: full-batch logistic
regression, a bagged CART random forest, stratified k-fold splitting, and
positive-class precision/recall/F1.

Everything is deterministic given the seed; zero-denominator metrics return
0 by convention; forest vote ties resolve to label 0.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np


class MLError(ValueError):
    """Invalid datasets, hyperparameters, or divergent training."""


@dataclass(frozen=True)
class Dataset:
    X: np.ndarray  # (n, d) float
    y: np.ndarray  # (n,) in {0, 1}

    def __post_init__(self):
        X, y = np.asarray(self.X, dtype=np.float64), np.asarray(self.y)
        if X.ndim != 2 or X.shape[0] < 1:
            raise MLError(f"X must be a non-empty 2-D matrix, got shape {X.shape}")
        if y.shape != (X.shape[0],):
            raise MLError(f"y shape {y.shape} does not match X rows {X.shape[0]}")
        if not np.all(np.isfinite(X)):
            raise MLError("X contains non-finite values")
        if not np.isin(y, (0, 1)).all():
            raise MLError("y must contain only 0 and 1")
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y.astype(np.int64))

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def d(self) -> int:
        return self.X.shape[1]

    def subset(self, idx) -> "Dataset":
        return Dataset(self.X[idx], self.y[idx])


@dataclass(frozen=True)
class Metrics:
    precision: float
    recall: float
    f1: float


def prf(y_true, y_pred) -> Metrics:
    """Positive-class precision/recall/F1; zero denominators give 0."""
    y_true, y_pred = np.asarray(y_true), np.asarray(y_pred)
    if y_true.shape != y_pred.shape:
        raise MLError(f"length mismatch: {y_true.shape} vs {y_pred.shape}")
    tp = int(np.sum((y_true == 1) & (y_pred == 1)))
    fp = int(np.sum((y_true == 0) & (y_pred == 1)))
    fn = int(np.sum((y_true == 1) & (y_pred == 0)))
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return Metrics(precision, recall, f1)


def standardize(X: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Column-wise (X - mean) / std; constant columns keep std 1."""
    X = np.asarray(X, dtype=np.float64)
    mean = X.mean(axis=0)
    std = X.std(axis=0)
    std = np.where(std == 0.0, 1.0, std)
    return (X - mean) / std, mean, std


def apply_standardize(X: np.ndarray, mean: np.ndarray, std: np.ndarray) -> np.ndarray:
    return (np.asarray(X, dtype=np.float64) - mean) / std


def loss_and_grad(
    X: np.ndarray, y: np.ndarray, w: np.ndarray, b: float, l2: float
) -> tuple[float, np.ndarray, float]:
    """Mean cross-entropy + (l2/2)||w||^2 and its gradient.

    Exposed separately so the gradient can be checked against finite
    differences.  Uses log(1+e^z) - y*z for numerical stability.
    """
    z = X @ w + b
    n = X.shape[0]
    # divergent weights legitimately produce inf/nan here; the caller checks
    with np.errstate(over="ignore", invalid="ignore"):
        loss = float(np.mean(np.logaddexp(0.0, z) - y * z) + 0.5 * l2 * (w @ w))
        p = 1.0 / (1.0 + np.exp(-z))
        residual = p - y
        grad_w = X.T @ residual / n + l2 * w
        grad_b = float(np.mean(residual))
    return loss, grad_w, grad_b


@dataclass(frozen=True)
class LogregModel:
    weights: np.ndarray
    bias: float

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        z = np.asarray(X, dtype=np.float64) @ self.weights + self.bias
        return 1.0 / (1.0 + np.exp(-np.clip(z, -500, 500)))

    def predict(self, X: np.ndarray) -> np.ndarray:
        return (self.predict_proba(X) >= 0.5).astype(np.int64)


def train_logreg(
    data: Dataset,
    learning_rate: float = 0.1,
    iterations: int = 500,
    l2: float = 1e-3,
    seed: int = 0,
) -> LogregModel:
    """Full-batch gradient descent from zero-initialized weights.

    Training is deterministic; the seed argument exists for interface
    uniformity with the forest trainer and is unused.
    """
    del seed
    if learning_rate <= 0 or iterations < 0 or l2 < 0:
        raise MLError("hyperparameters must be positive (iterations >= 0)")
    w = np.zeros(data.d)
    b = 0.0
    for it in range(iterations):
        loss, grad_w, grad_b = loss_and_grad(data.X, data.y, w, b, l2)
        if not math.isfinite(loss):
            raise MLError(f"non-finite loss at iteration {it}")
        w = w - learning_rate * grad_w
        b = b - learning_rate * grad_b
    return LogregModel(w, b)


@dataclass(frozen=True)
class TreeNode:
    feature: int | None  # None marks a leaf
    threshold: float
    left: "TreeNode | None"
    right: "TreeNode | None"
    label: int


def _gini(counts: np.ndarray) -> float:
    total = counts.sum()
    if total == 0:
        return 0.0
    p = counts / total
    return float(1.0 - np.sum(p * p))


def _majority(y: np.ndarray) -> int:
    ones = int(y.sum())
    zeros = len(y) - ones
    return 1 if ones > zeros else 0  # tie -> 0


def _best_split(
    X: np.ndarray, y: np.ndarray, features, min_leaf: int
) -> tuple[int, float] | None:
    """Lowest weighted-Gini split over candidate features; thresholds are
    midpoints between consecutive distinct values.  First feature / lowest
    threshold wins ties."""
    n = len(y)
    best: tuple[float, int, float] | None = None
    for f in features:
        order = np.argsort(X[:, f], kind="stable")
        xs, ys = X[order, f], y[order]
        left = np.array([0, 0])
        right = np.array([n - int(ys.sum()), int(ys.sum())])
        for i in range(n - 1):
            left[ys[i]] += 1
            right[ys[i]] -= 1
            if xs[i] == xs[i + 1]:
                continue
            if i + 1 < min_leaf or n - i - 1 < min_leaf:
                continue
            score = ((i + 1) * _gini(left) + (n - i - 1) * _gini(right)) / n
            threshold = (xs[i] + xs[i + 1]) / 2.0
            key = (score, f, threshold)
            if best is None or key < best:
                best = key
    if best is None:
        return None
    return best[1], best[2]


def _grow_tree(
    X: np.ndarray,
    y: np.ndarray,
    depth: int,
    max_depth: int | None,
    min_leaf: int,
    n_features: int | None,
    rng: np.random.Generator,
) -> TreeNode:
    label = _majority(y)
    if len(np.unique(y)) == 1 or (max_depth is not None and depth >= max_depth):
        return TreeNode(None, 0.0, None, None, label)
    d = X.shape[1]
    if n_features is not None and n_features < d:
        features = sorted(rng.choice(d, size=n_features, replace=False).tolist())
    else:
        features = range(d)
    split = _best_split(X, y, features, min_leaf)
    if split is None:
        return TreeNode(None, 0.0, None, None, label)
    f, threshold = split
    mask = X[:, f] <= threshold
    left = _grow_tree(X[mask], y[mask], depth + 1, max_depth, min_leaf, n_features, rng)
    right = _grow_tree(X[~mask], y[~mask], depth + 1, max_depth, min_leaf, n_features, rng)
    return TreeNode(f, threshold, left, right, label)


def _tree_predict_one(node: TreeNode, x: np.ndarray) -> int:
    while node.feature is not None:
        node = node.left if x[node.feature] <= node.threshold else node.right
    return node.label


@dataclass(frozen=True)
class ForestModel:
    trees: tuple[TreeNode, ...]

    def predict(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        votes = np.zeros(len(X), dtype=np.int64)
        for tree in self.trees:
            votes += [_tree_predict_one(tree, x) for x in X]
        # majority with ties toward 0
        return (votes * 2 > len(self.trees)).astype(np.int64)


def train_random_forest(
    data: Dataset,
    n_trees: int = 25,
    max_depth: int | None = None,
    min_leaf: int = 1,
    feature_subsample: float | None = None,
    seed: int = 0,
) -> ForestModel:
    """Bagged Gini-split trees with majority vote.

    feature_subsample is the fraction of features drawn per split (None =
    all).  Per-tree generators come from spawned seed sequences, so results
    do not depend on training order.
    """
    if n_trees < 1:
        raise MLError(f"n_trees must be >= 1, got {n_trees}")
    if min_leaf < 1:
        raise MLError(f"min_leaf must be >= 1, got {min_leaf}")
    n_features = None
    if feature_subsample is not None:
        if not 0.0 < feature_subsample <= 1.0:
            raise MLError(f"feature_subsample must be in (0, 1], got {feature_subsample}")
        n_features = max(1, round(feature_subsample * data.d))
    trees = []
    for child in np.random.SeedSequence(seed).spawn(n_trees):
        rng = np.random.default_rng(child)
        idx = rng.integers(0, data.n, size=data.n)
        trees.append(
            _grow_tree(data.X[idx], data.y[idx], 0, max_depth, min_leaf, n_features, rng)
        )
    return ForestModel(tuple(trees))


def stratified_folds(y: np.ndarray, k: int, seed: int = 0) -> list[np.ndarray]:
    """Round-robin per-class assignment after a seeded shuffle; returns k
    test-index arrays partitioning range(n)."""
    y = np.asarray(y)
    n = len(y)
    if k < 2:
        raise MLError(f"k must be >= 2, got {k}")
    if k > n:
        raise MLError(f"k={k} exceeds sample count {n}")
    if len(np.unique(y)) < 2:
        raise MLError("both classes must be present")
    rng = np.random.default_rng(seed)
    fold_of = np.empty(n, dtype=np.int64)
    position = 0
    for label in (0, 1):
        idx = np.flatnonzero(y == label)
        rng.shuffle(idx)
        for i in idx:
            fold_of[i] = position % k
            position += 1
    return [np.flatnonzero(fold_of == f) for f in range(k)]


def kfold_cv(data: Dataset, k: int, trainer, seed: int = 0) -> list[Metrics]:
    """Stratified k-fold; trainer(train_data) -> model with predict(X)."""
    folds = stratified_folds(data.y, k, seed)
    results = []
    for test_idx in folds:
        train_mask = np.ones(data.n, dtype=bool)
        train_mask[test_idx] = False
        model = trainer(data.subset(train_mask))
        y_pred = model.predict(data.X[test_idx])
        results.append(prf(data.y[test_idx], y_pred))
    return results


def _tree_to_json(node: TreeNode) -> dict:
    if node.feature is None:
        return {"label": node.label}
    return {
        "feature": node.feature,
        "threshold": node.threshold,
        "label": node.label,
        "left": _tree_to_json(node.left),
        "right": _tree_to_json(node.right),
    }


def _tree_from_json(obj: dict) -> TreeNode:
    if "feature" not in obj:
        return TreeNode(None, 0.0, None, None, int(obj["label"]))
    return TreeNode(
        int(obj["feature"]),
        float(obj["threshold"]),
        _tree_from_json(obj["left"]),
        _tree_from_json(obj["right"]),
        int(obj["label"]),
    )


def model_to_json(model) -> dict:
    if isinstance(model, LogregModel):
        return {
            "kind": "logreg",
            "weights": model.weights.tolist(),
            "bias": model.bias,
        }
    if isinstance(model, ForestModel):
        return {"kind": "random_forest", "trees": [_tree_to_json(t) for t in model.trees]}
    raise MLError(f"unsupported model type {type(model).__name__}")


def model_from_json(obj: dict):
    kind = obj.get("kind")
    if kind == "logreg":
        return LogregModel(np.asarray(obj["weights"], dtype=np.float64), float(obj["bias"]))
    if kind == "random_forest":
        return ForestModel(tuple(_tree_from_json(t) for t in obj["trees"]))
    raise MLError(f"unknown model kind {kind!r}")


def save_model(path: str, model) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(model_to_json(model), fh)
        fh.write("\n")


def load_model(path: str):
    with open(path, encoding="utf-8") as fh:
        return model_from_json(json.load(fh))
