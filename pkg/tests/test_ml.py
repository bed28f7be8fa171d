"""Logistic regression, CART forest, folds, and metrics.

The gradient oracle is central finite differences on the loss; the tree
tests use constructed datasets with known optimal splits.
"""

import numpy as np
import pytest

from scitrends.ml import (
    Dataset,
    MLError,
    apply_standardize,
    kfold_cv,
    load_model,
    loss_and_grad,
    model_from_json,
    model_to_json,
    prf,
    save_model,
    standardize,
    stratified_folds,
    train_logreg,
    train_random_forest,
)


def random_dataset(rng, n=30, d=4):
    X = rng.normal(size=(n, d))
    y = (rng.random(n) < 0.5).astype(int)
    if y.min() == y.max():
        y[0] = 1 - y[0]
    return Dataset(X, y)


# --- gradient vs finite differences ---------------------------------------

def numeric_gradient(X, y, w, b, l2, eps=1e-6):
    grad_w = np.zeros_like(w)
    for j in range(len(w)):
        plus, minus = w.copy(), w.copy()
        plus[j] += eps
        minus[j] -= eps
        lp, _, _ = loss_and_grad(X, y, plus, b, l2)
        lm, _, _ = loss_and_grad(X, y, minus, b, l2)
        grad_w[j] = (lp - lm) / (2 * eps)
    lp, _, _ = loss_and_grad(X, y, w, b + eps, l2)
    lm, _, _ = loss_and_grad(X, y, w, b - eps, l2)
    return grad_w, (lp - lm) / (2 * eps)


def test_gradient_matches_finite_differences():
    rng = np.random.default_rng(0)
    for _ in range(20):
        data = random_dataset(rng, n=rng.integers(5, 40), d=rng.integers(1, 6))
        w = rng.normal(size=data.d)
        b = float(rng.normal())
        l2 = float(rng.uniform(0, 0.5))
        _, grad_w, grad_b = loss_and_grad(data.X, data.y, w, b, l2)
        num_w, num_b = numeric_gradient(data.X, data.y, w, b, l2)
        scale = max(1.0, float(np.max(np.abs(num_w))), abs(num_b))
        assert np.max(np.abs(grad_w - num_w)) / scale < 1e-6
        assert abs(grad_b - num_b) / scale < 1e-6


def test_training_monotonically_reduces_loss():
    rng = np.random.default_rng(1)
    data = random_dataset(rng, n=60, d=3)
    w = np.zeros(data.d)
    b = 0.0
    losses = []
    for _ in range(50):
        loss, gw, gb = loss_and_grad(data.X, data.y, w, b, 1e-3)
        losses.append(loss)
        w -= 0.01 * gw
        b -= 0.01 * gb
    assert all(b <= a + 1e-12 for a, b in zip(losses, losses[1:]))


def test_logreg_fits_separable_data():
    rng = np.random.default_rng(2)
    n = 100
    X = np.vstack([rng.normal(-2, 0.3, (n // 2, 2)), rng.normal(2, 0.3, (n // 2, 2))])
    y = np.array([0] * (n // 2) + [1] * (n // 2))
    model = train_logreg(Dataset(X, y), learning_rate=0.5, iterations=300)
    assert (model.predict(X) == y).all()


def test_logreg_is_deterministic_and_ignores_seed():
    rng = np.random.default_rng(3)
    data = random_dataset(rng, n=50)
    a = train_logreg(data, seed=0)
    b = train_logreg(data, seed=99)
    assert np.array_equal(a.weights, b.weights) and a.bias == b.bias


def test_logreg_rejects_bad_hyperparameters():
    rng = np.random.default_rng(4)
    data = random_dataset(rng)
    with pytest.raises(MLError):
        train_logreg(data, learning_rate=0.0)
    with pytest.raises(MLError):
        train_logreg(data, l2=-1.0)


def test_divergence_error_names_iteration():
    rng = np.random.default_rng(5)
    data = random_dataset(rng, n=20, d=2)
    big = Dataset(data.X * 1e200, data.y)
    with np.errstate(all="ignore"), pytest.raises(MLError, match="iteration"):
        train_logreg(big, learning_rate=1e200, iterations=50)


# --- dataset validation ---------------------------------------------------

def test_dataset_validation():
    with pytest.raises(MLError):
        Dataset(np.zeros((2,)), np.zeros(2))
    with pytest.raises(MLError):
        Dataset(np.zeros((2, 2)), np.zeros(3))
    with pytest.raises(MLError):
        Dataset(np.full((2, 2), np.nan), np.zeros(2))
    with pytest.raises(MLError):
        Dataset(np.zeros((2, 2)), np.array([0, 2]))


def test_standardize_round_trip():
    rng = np.random.default_rng(6)
    X = rng.normal(3.0, 2.0, size=(40, 3))
    X[:, 2] = 7.0  # constant column
    Z, mean, std = standardize(X)
    assert np.allclose(Z.mean(axis=0), 0.0, atol=1e-12)
    assert np.allclose(Z[:, :2].std(axis=0), 1.0)
    assert np.allclose(Z[:, 2], 0.0)
    assert np.allclose(apply_standardize(X, mean, std), Z)


# --- metrics --------------------------------------------------------------

def test_prf_hand_values():
    # TP=3, FP=1, FN=2
    y_true = [1, 1, 1, 0, 1, 1]
    y_pred = [1, 1, 1, 1, 0, 0]
    m = prf(y_true, y_pred)
    assert m.precision == 0.75
    assert m.recall == 0.6
    assert m.f1 == pytest.approx(0.6667, abs=1e-4)


def test_prf_zero_denominators():
    m = prf([0, 0], [0, 0])
    assert (m.precision, m.recall, m.f1) == (0.0, 0.0, 0.0)
    assert prf([1, 1], [0, 0]).precision == 0.0
    assert prf([0, 0], [1, 1]).recall == 0.0


def test_prf_bounds():
    rng = np.random.default_rng(7)
    for _ in range(50):
        y_true = (rng.random(20) < 0.5).astype(int)
        y_pred = (rng.random(20) < 0.5).astype(int)
        m = prf(y_true, y_pred)
        assert 0.0 <= m.precision <= 1.0
        assert 0.0 <= m.recall <= 1.0
        assert 0.0 <= m.f1 <= 1.0


def test_prf_shape_mismatch():
    with pytest.raises(MLError):
        prf([1, 0], [1])


# --- trees and forest -----------------------------------------------------

def test_forest_cracks_xor():
    X = np.array([[0, 0], [0, 1], [1, 0], [1, 1]] * 10, dtype=float)
    y = np.array([0, 1, 1, 0] * 10)
    model = train_random_forest(Dataset(X, y), n_trees=25, max_depth=2, seed=0)
    assert (model.predict(X) == y).all()


def test_forest_constant_labels():
    X = np.arange(10, dtype=float).reshape(-1, 1)
    model = train_random_forest(Dataset(X, np.ones(10, dtype=int)), n_trees=5)
    assert (model.predict(X) == 1).all()


def test_forest_deterministic_per_seed():
    rng = np.random.default_rng(8)
    data = random_dataset(rng, n=40, d=3)
    a = train_random_forest(data, n_trees=7, seed=3)
    b = train_random_forest(data, n_trees=7, seed=3)
    c = train_random_forest(data, n_trees=7, seed=4)
    probe = rng.normal(size=(25, 3))
    assert np.array_equal(a.predict(probe), b.predict(probe))
    assert a.trees == b.trees
    assert a.trees != c.trees


def test_forest_vote_tie_goes_to_zero():
    # 2 trees, constructed to disagree: vote 1 vs 1 -> 0
    from scitrends.ml import ForestModel, TreeNode

    always0 = TreeNode(None, 0.0, None, None, 0)
    always1 = TreeNode(None, 0.0, None, None, 1)
    model = ForestModel((always0, always1))
    assert model.predict(np.zeros((3, 2))).tolist() == [0, 0, 0]


def test_forest_validation():
    rng = np.random.default_rng(9)
    data = random_dataset(rng)
    with pytest.raises(MLError):
        train_random_forest(data, n_trees=0)
    with pytest.raises(MLError):
        train_random_forest(data, min_leaf=0)
    with pytest.raises(MLError):
        train_random_forest(data, feature_subsample=0.0)


def test_min_leaf_respected():
    # split at x <= 0.5 would isolate one sample; min_leaf=3 forbids every
    # split of this 4-sample set, so the root becomes a leaf
    X = np.array([[0.0], [1.0], [1.0], [1.0]])
    y = np.array([1, 0, 0, 0])
    model = train_random_forest(Dataset(X, y), n_trees=1, min_leaf=3, seed=0)
    tree = model.trees[0]
    assert tree.feature is None


# --- folds and cross-validation -------------------------------------------

def test_folds_partition_and_stratify():
    y = np.array([0] * 12 + [1] * 8)
    folds = stratified_folds(y, 4, seed=0)
    all_idx = np.concatenate(folds)
    assert sorted(all_idx.tolist()) == list(range(20))
    for fold in folds:
        assert np.sum(y[fold] == 0) == 3
        assert np.sum(y[fold] == 1) == 2


def test_folds_ten_of_ten_are_singletons():
    y = np.array([0] * 5 + [1] * 5)
    folds = stratified_folds(y, 10, seed=0)
    assert sorted(len(f) for f in folds) == [1] * 10


def test_folds_deterministic_per_seed():
    y = np.array([0, 1] * 10)
    a = stratified_folds(y, 5, seed=2)
    b = stratified_folds(y, 5, seed=2)
    c = stratified_folds(y, 5, seed=3)
    assert all(np.array_equal(x, z) for x, z in zip(a, b))
    assert any(not np.array_equal(x, z) for x, z in zip(a, c))


def test_folds_validation():
    with pytest.raises(MLError):
        stratified_folds(np.array([0, 1, 0]), 1)
    with pytest.raises(MLError):
        stratified_folds(np.array([0, 1]), 3)
    with pytest.raises(MLError):
        stratified_folds(np.array([1, 1, 1]), 2)


def test_kfold_cv_runs_trainer_per_fold():
    rng = np.random.default_rng(10)
    n = 60
    X = np.vstack([rng.normal(-2, 0.5, (n // 2, 2)), rng.normal(2, 0.5, (n // 2, 2))])
    y = np.array([0] * (n // 2) + [1] * (n // 2))
    results = kfold_cv(Dataset(X, y), 5, lambda d: train_logreg(d, 0.5, 200), seed=0)
    assert len(results) == 5
    assert all(m.f1 > 0.9 for m in results)


# --- serialization --------------------------------------------------------

def test_logreg_json_round_trip(tmp_path):
    rng = np.random.default_rng(11)
    data = random_dataset(rng, n=30)
    model = train_logreg(data)
    again = model_from_json(model_to_json(model))
    assert np.array_equal(model.weights, again.weights)
    assert model.bias == again.bias
    path = tmp_path / "m.json"
    save_model(path, model)
    loaded = load_model(path)
    assert np.array_equal(loaded.predict(data.X), model.predict(data.X))


def test_forest_json_round_trip(tmp_path):
    rng = np.random.default_rng(12)
    data = random_dataset(rng, n=30)
    model = train_random_forest(data, n_trees=4, seed=1)
    path = tmp_path / "f.json"
    save_model(path, model)
    loaded = load_model(path)
    assert loaded.trees == model.trees
