"""L2-regularized linear binary classifier with deterministic training and dev-split tuning."""

from __future__ import annotations

from collections.abc import Callable, Sequence
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from phrasekld.errors import MalformedInputError, ValidationError

DEFAULT_C_GRID = (0.01, 0.1, 1.0, 10.0, 100.0)
DEFAULT_SEED = 1234
MAX_EPOCHS = 1000
TOL = 1e-6
DEV_FRACTION = 0.2
MODEL_HEADER = "phrasekld-linear-model v1"


@dataclass(frozen=True, eq=False)
class LinearModel:
    weights: np.ndarray
    bias: float
    mean: np.ndarray
    std: np.ndarray
    C: float
    seed: int
    loss: str = "hinge"
    # objective value after every optimizer epoch (dual objective for hinge)
    history: tuple[float, ...] = field(default=(), repr=False)

    @property
    def n_features(self) -> int:
        return len(self.weights)

    def standardize(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        scale = np.where(self.std > 0, self.std, 1.0)
        return (X - self.mean) / scale

    def decision_function(self, X) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        if X.shape[1] != self.n_features:
            raise ValidationError(f"expected {self.n_features} features, got {X.shape[1]}")
        return self.standardize(X) @ self.weights + self.bias

    def predict(self, X) -> np.ndarray:
        return (self.decision_function(X) >= 0).astype(np.int64)


def _check_training_data(X, y) -> tuple[np.ndarray, np.ndarray]:
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y)
    if X.ndim != 2 or len(X) != len(y):
        raise ValidationError(f"feature matrix shape {X.shape} does not match {len(y)} labels")
    bad = np.argwhere(~np.isfinite(X))
    if bad.size:
        r, c = bad[0]
        raise ValidationError(f"non-finite feature at row {r}, column {c}")
    if not np.all((y == 0) | (y == 1)):
        raise ValidationError("labels must be 0/1")
    if len(np.unique(y)) < 2:
        raise ValidationError("training data must contain both classes")
    return X, y.astype(np.int64)


def _dual_cd(Xs: np.ndarray, ys: np.ndarray, C: float, rng: np.random.Generator, max_epochs: int, tol: float):
    """Dual coordinate descent for the hinge-loss SVM; bias enters as a constant feature."""
    n, d = Xs.shape
    Xa = np.hstack([Xs, np.ones((n, 1))])
    qdiag = np.einsum("ij,ij->i", Xa, Xa)
    alpha = np.zeros(n)
    w = np.zeros(d + 1)
    history = []
    prev = 0.0
    for _ in range(max_epochs):
        for i in rng.permutation(n):
            xi = Xa[i]
            g = ys[i] * (w @ xi) - 1.0
            a = alpha[i]
            if a == 0.0:
                pg = min(g, 0.0)
            elif a == C:
                pg = max(g, 0.0)
            else:
                pg = g
            if pg != 0.0:
                new = min(max(a - g / qdiag[i], 0.0), C)
                w += (new - a) * ys[i] * xi
                alpha[i] = new
        obj = 0.5 * (w @ w) - alpha.sum()
        history.append(float(obj))
        if prev - obj <= tol * max(1.0, abs(obj)):
            break
        prev = obj
    return w[:-1], float(w[-1]), history


def _logistic(Xs: np.ndarray, ys: np.ndarray, C: float, max_iter: int, tol: float):
    n, d = Xs.shape

    def fun(theta):
        w, b = theta[:-1], theta[-1]
        m = ys * (Xs @ w + b)
        loss = np.logaddexp(0.0, -m)
        s = -ys * np.exp(-np.logaddexp(0.0, m))  # d loss / d score
        grad_w = w + C * (Xs.T @ s)
        return 0.5 * (w @ w) + C * loss.sum(), np.append(grad_w, C * s.sum())

    history = []
    res = minimize(
        fun,
        np.zeros(d + 1),
        jac=True,
        method="L-BFGS-B",
        callback=lambda th: history.append(float(fun(th)[0])),
        options={"maxiter": max_iter, "ftol": tol},
    )
    return res.x[:-1], float(res.x[-1]), history


def train_linear(
    features,
    labels,
    C: float = 1.0,
    seed: int = DEFAULT_SEED,
    loss: str = "hinge",
    standardize: bool = True,
    max_epochs: int = MAX_EPOCHS,
    tol: float = TOL,
) -> LinearModel:
    """Minimize 0.5*||w||^2 + C * sum(loss(y_i * (w.x_i + b))) on z-scored features.

    Zero-variance columns are centered but not scaled. ``standardize=False``
    uses the identity standardizer.
    """
    if C <= 0:
        raise ValidationError("C must be > 0")
    X, y = _check_training_data(features, labels)
    if standardize:
        mean = X.mean(axis=0)
        std = X.std(axis=0)
    else:
        mean = np.zeros(X.shape[1])
        std = np.ones(X.shape[1])
    Xs = (X - mean) / np.where(std > 0, std, 1.0)
    ys = np.where(y == 1, 1.0, -1.0)
    if loss == "hinge":
        w, b, hist = _dual_cd(Xs, ys, C, np.random.default_rng(seed), max_epochs, tol)
    elif loss == "logistic":
        w, b, hist = _logistic(Xs, ys, C, max_epochs, tol)
    else:
        raise ValidationError(f"unknown loss {loss!r}")
    return LinearModel(weights=w, bias=b, mean=mean, std=std, C=C, seed=seed, loss=loss, history=tuple(hist))


def predict(model: LinearModel, features) -> tuple[int, float]:
    """Label and score for one feature vector; score 0 counts as positive."""
    x = np.asarray(features, dtype=np.float64)
    if x.ndim != 1 or len(x) != model.n_features:
        raise ValidationError(f"expected {model.n_features} features, got shape {x.shape}")
    score = float(model.decision_function(x)[0])
    return int(score >= 0), score


def save_model(model: LinearModel, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(MODEL_HEADER + "\n")
        fh.write(f"loss\t{model.loss}\n")
        fh.write(f"C\t{model.C!r}\n")
        fh.write(f"seed\t{model.seed}\n")
        fh.write(f"n_features\t{model.n_features}\n")
        fh.write(f"bias\t{model.bias!r}\n")
        fh.write("# mean\tstd\tweight\n")
        for m, s, w in zip(model.mean, model.std, model.weights):
            fh.write(f"{float(m)!r}\t{float(s)!r}\t{float(w)!r}\n")


def load_model(path) -> LinearModel:
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines or lines[0] != MODEL_HEADER:
        raise MalformedInputError(f"missing header {MODEL_HEADER!r}", path, 1)
    meta = {}
    rows = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line or line.startswith("#"):
            continue
        fields = line.split("\t")
        try:
            if len(fields) == 2:
                meta[fields[0]] = fields[1]
            elif len(fields) == 3:
                rows.append([float(f) for f in fields])
            else:
                raise ValueError
        except ValueError:
            raise MalformedInputError(f"bad model line {line!r}", path, lineno) from None
    try:
        n = int(meta["n_features"])
        arr = np.array(rows, dtype=np.float64).reshape(n, 3)
        return LinearModel(
            weights=arr[:, 2].copy(),
            bias=float(meta["bias"]),
            mean=arr[:, 0].copy(),
            std=arr[:, 1].copy(),
            C=float(meta["C"]),
            seed=int(meta["seed"]),
            loss=meta["loss"],
        )
    except (KeyError, ValueError) as exc:
        raise MalformedInputError(f"incomplete model file ({exc})", path) from None


def stratified_split(labels, seed: int, dev_fraction: float = DEV_FRACTION) -> tuple[np.ndarray, np.ndarray]:
    """Deterministic per-class shuffle; the first round(fraction * n_class) go to dev."""
    y = np.asarray(labels)
    rng = np.random.default_rng(seed)
    fit, dev = [], []
    for cls in (0, 1):
        idx = np.flatnonzero(y == cls)
        idx = idx[rng.permutation(len(idx))]
        n_dev = int(round(dev_fraction * len(idx)))
        if n_dev == 0 or n_dev == len(idx):
            raise ValidationError(f"dev split leaves class {cls} empty on one side")
        dev.append(idx[:n_dev])
        fit.append(idx[n_dev:])
    return np.sort(np.concatenate(fit)), np.sort(np.concatenate(dev))


@dataclass
class TuneResult:
    C: float
    k: int
    accuracy: float
    # (C, k, dev accuracy) in grid order
    report: list[tuple[float, int, float]]


Featurizer = Callable[[Sequence[int], Sequence[int], int], tuple[np.ndarray, np.ndarray]]


def tune(
    labels,
    featurize: Featurizer,
    C_grid: Sequence[float] = DEFAULT_C_GRID,
    k_grid: Sequence[int] = (3,),
    seed: int = DEFAULT_SEED,
    loss: str = "hinge",
) -> TuneResult:
    """Grid search over (C, k) on a stratified 80/20 split of the training pairs.

    ``featurize(fit_idx, dev_idx, k)`` must fit unit weights on the ``fit_idx``
    pairs only and return feature matrices for both index sets. Ties prefer
    the smaller C, then the smaller k.
    """
    if not C_grid or not k_grid:
        raise ValidationError("empty tuning grid")
    y = np.asarray(labels)
    fit_idx, dev_idx = stratified_split(y, seed)
    report = []
    best = None
    for k in sorted(k_grid):
        X_fit, X_dev = featurize(fit_idx, dev_idx, k)
        for C in sorted(C_grid):
            model = train_linear(X_fit, y[fit_idx], C=C, seed=seed, loss=loss)
            acc = float(np.mean(model.predict(X_dev) == y[dev_idx]))
            report.append((C, k, acc))
    for C, k, acc in sorted(report, key=lambda r: (r[0], r[1])):
        if best is None or acc > best[2]:
            best = (C, k, acc)
    return TuneResult(C=best[0], k=best[1], accuracy=best[2], report=report)
