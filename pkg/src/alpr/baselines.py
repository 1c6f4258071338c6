"""Reference classifiers: ridge regression, retargeted least squares, raw 1-NN."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .classify import nearest_labels
from .core import Dataset, one_hot, validate
from .retarget import retarget_matrix
from .solver import _spd_solve

ARGMAX = "argmax-of-output"
NEAREST = "nearest-neighbor-in-target-space"
NEAREST_RAW = "nearest-neighbor-in-feature-space"


@dataclass(frozen=True, eq=False)
class LinearModel:
    """A fitted baseline.

    For the raw nearest-neighbor classifier ``projection`` is None and the
    training data are memorized in ``train_points``/``train_labels``.
    """

    projection: np.ndarray | None
    decision_rule: str = ARGMAX
    train_points: np.ndarray | None = None
    train_labels: np.ndarray | None = None
    objective_trace: tuple[float, ...] = field(default=())

    def predict(self, samples) -> np.ndarray:
        """Labels (1-based) for the columns of an m x k matrix."""
        samples = np.asarray(samples, dtype=float)
        if samples.ndim == 1:
            samples = samples[:, None]
        if self.decision_rule == ARGMAX:
            return np.argmax(samples.T @ self.projection, axis=1) + 1
        if self.decision_rule == NEAREST:
            return nearest_labels((self.projection.T @ self.train_points).T, self.train_labels,
                                  (self.projection.T @ samples).T)
        if self.decision_rule == NEAREST_RAW:
            return nearest_labels(self.train_points.T, self.train_labels, samples.T)
        raise ValueError(f"unknown decision rule {self.decision_rule!r}")


def ridge_objective(X, Y, W, lam) -> float:
    return float(np.sum((Y - X.T @ W) ** 2) + lam * np.sum(W * W))


def _ridge_solve(X, T, lam):
    return _spd_solve(X @ X.T + lam * np.eye(X.shape[0]), X @ T)


def fit_ridge(dataset: Dataset, lam: float) -> LinearModel:
    """W = (X X' + lam I)^{-1} X Y with argmax decisions."""
    if not lam > 0:
        raise ValueError("lambda must be positive")
    validate(dataset)
    return LinearModel(_ridge_solve(dataset.features, one_hot(dataset), lam))


def fit_relsr(dataset: Dataset, lam: float, max_iters: int = 50, rel_tol: float = 1e-6,
              retarget: bool = True) -> LinearModel:
    """Retargeted least squares: alternate ridge W and margin-retargeted T.

    With ``retarget=False`` T stays at the one-hot matrix and the result is
    plain ridge regression.
    """
    if not lam > 0:
        raise ValueError("lambda must be positive")
    validate(dataset)
    X = dataset.features
    T = one_hot(dataset)
    trace = []
    W = None
    for _ in range(max_iters):
        W = _ridge_solve(X, T, lam)
        if retarget:
            T = retarget_matrix(X.T @ W, dataset.labels).matrix
        obj = ridge_objective(X, T, W, lam)
        trace.append(obj)
        if len(trace) > 1 and abs(trace[-2] - obj) < rel_tol * max(trace[-2], np.finfo(float).tiny):
            break
        if not retarget:
            break
    return LinearModel(W, ARGMAX, objective_trace=tuple(trace))


def fit_nc(dataset: Dataset) -> LinearModel:
    """Memorize the training set for 1-NN in the original feature space."""
    validate(dataset)
    return LinearModel(None, NEAREST_RAW, np.array(dataset.features), np.array(dataset.labels))
