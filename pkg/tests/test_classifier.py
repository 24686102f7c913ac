import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from phrasekld.classifier import (
    LinearModel,
    load_model,
    predict,
    save_model,
    stratified_split,
    train_linear,
    tune,
)
from phrasekld.errors import ValidationError

X_SEP = np.array([[-1.0], [-1.0], [1.0], [1.0]])
Y_SEP = np.array([0, 0, 1, 1])


def _blobs(seed, n=80, d=5):
    rng = np.random.default_rng(seed)
    y = rng.integers(0, 2, n)
    y[:2] = [0, 1]
    X = rng.standard_normal((n, d)) + np.outer(2 * y - 1, rng.standard_normal(d))
    return X, y


def test_separable_toy_set():
    m = train_linear(X_SEP, Y_SEP, C=1.0, seed=0)
    assert np.all(m.predict(X_SEP) == Y_SEP)
    assert predict(m, [0.7]) == (1, pytest.approx(float(m.decision_function([0.7])[0])))
    assert predict(m, [0.7])[0] == 1
    assert predict(m, [-3.0])[0] == 0


def test_deterministic_bit_identical():
    X, y = _blobs(0)
    a = train_linear(X, y, C=0.5, seed=7)
    b = train_linear(X, y, C=0.5, seed=7)
    assert a.weights.tobytes() == b.weights.tobytes() and a.bias == b.bias


def test_zero_column_gets_zero_weight():
    X, y = _blobs(1)
    X[:, 2] = 0.0
    m = train_linear(X, y, C=1.0)
    assert m.weights[2] == 0.0
    X[:, 2] = 3.5  # constant but nonzero: centered away
    assert train_linear(X, y, C=1.0).weights[2] == 0.0


def test_score_zero_is_positive():
    m = LinearModel(weights=np.array([1.0]), bias=0.0, mean=np.zeros(1), std=np.ones(1), C=1.0, seed=0)
    assert predict(m, [0.0]) == (1, 0.0)


@given(st.integers(0, 200))
@settings(max_examples=20, deadline=None)
def test_negating_model_flips_labels(seed):
    X, y = _blobs(seed)
    m = train_linear(X, y, C=1.0, seed=seed)
    neg = LinearModel(weights=-m.weights, bias=-m.bias, mean=m.mean, std=m.std, C=m.C, seed=m.seed)
    s = m.decision_function(X)
    off = s != 0
    assert np.all(m.predict(X)[off] != neg.predict(X)[off])


@given(st.integers(0, 200), st.sampled_from([0.01, 1.0, 100.0]))
@settings(max_examples=25, deadline=None)
def test_dual_objective_non_increasing(seed, C):
    X, y = _blobs(seed)
    m = train_linear(X, y, C=C, seed=seed)
    h = np.array(m.history)
    assert len(h) >= 1
    assert np.all(np.diff(h) <= 1e-9 * np.maximum(1.0, np.abs(h[1:])))


@given(st.integers(0, 200))
@settings(max_examples=20, deadline=None)
def test_external_standardization_round_trip(seed):
    X, y = _blobs(seed)
    m = train_linear(X, y, C=1.0, seed=seed)
    Xs = m.standardize(X)
    ident = train_linear(Xs, y, C=1.0, seed=seed, standardize=False)
    assert np.array_equal(m.predict(X), ident.predict(Xs))


def test_training_errors():
    with pytest.raises(ValidationError):
        train_linear(X_SEP, np.ones(4, dtype=int))
    X = X_SEP.copy()
    X[2, 0] = np.nan
    with pytest.raises(ValidationError, match="row 2, column 0"):
        train_linear(X, Y_SEP)
    with pytest.raises(ValidationError):
        train_linear(X_SEP, Y_SEP, C=0)
    m = train_linear(X_SEP, Y_SEP)
    with pytest.raises(ValidationError):
        predict(m, [1.0, 2.0])


def test_logistic_loss_option():
    X, y = _blobs(3)
    m = train_linear(X, y, C=1.0, loss="logistic")
    assert np.mean(m.predict(X) == y) > 0.9
    h = np.array(m.history)
    assert np.all(np.diff(h) <= 1e-9 * np.maximum(1.0, np.abs(h[1:])))


def test_model_file_roundtrip(tmp_path):
    X, y = _blobs(4)
    m = train_linear(X, y, C=0.3, seed=9)
    path = tmp_path / "model.txt"
    save_model(m, path)
    back = load_model(path)
    assert np.array_equal(back.weights, m.weights) and back.bias == m.bias
    assert np.array_equal(back.predict(X), m.predict(X))
    assert path.read_text().startswith("phrasekld-linear-model v1\n")


def test_stratified_split_deterministic():
    y = np.array([0] * 10 + [1] * 20)
    a = stratified_split(y, 5)
    b = stratified_split(y, 5)
    assert all(np.array_equal(u, v) for u, v in zip(a, b))
    fit, dev = a
    assert sorted(np.concatenate([fit, dev]).tolist()) == list(range(30))
    assert (y[dev] == 0).sum() == 2 and (y[dev] == 1).sum() == 4
    with pytest.raises(ValidationError):
        stratified_split(np.array([0, 0, 1, 1, 1, 1, 1]), 0)


def _slicer(X):
    return lambda f, d, k: (X[f], X[d])


def test_tune_single_point():
    X, y = _blobs(5)
    r = tune(y, _slicer(X), C_grid=[0.3], k_grid=[7])
    assert (r.C, r.k) == (0.3, 7)


def test_tune_ties_prefer_small_k_and_C():
    X, y = _blobs(6)
    r = tune(y, _slicer(X), C_grid=[10.0, 1.0], k_grid=[5, 3, 1])
    assert r.k == 1
    best = max(acc for _, _, acc in r.report)
    assert r.C == min(C for C, k, acc in r.report if acc == best and k == 1)


def test_tune_rejects_empty_grid():
    X, y = _blobs(5)
    with pytest.raises(ValidationError):
        tune(y, _slicer(X), C_grid=[])
