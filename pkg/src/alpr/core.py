"""Shared domain types: datasets, labels, solver settings and fitted state.

Features are stored one column per sample (``features`` is m x n).  Labels
are 1-based everywhere they are visible to callers; a few routines index
with ``labels - 1`` internally.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np


class DatasetError(ValueError):
    """Raised when a dataset violates one of its invariants."""


def _frozen(a, dtype=float):
    a = np.array(a, dtype=dtype, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Dataset:
    """Feature matrix (features x samples) with integer class labels in 1..C.

    Construction only copies and freezes the arrays; call :func:`validate`
    to check the invariants.
    """

    features: np.ndarray
    labels: np.ndarray
    class_count: int

    def __post_init__(self):
        feats = _frozen(self.features)
        if feats.ndim == 1:
            feats = _frozen(feats.reshape(1, -1))
        object.__setattr__(self, "features", feats)
        object.__setattr__(self, "labels", _frozen(np.ravel(self.labels), dtype=np.int64))
        object.__setattr__(self, "class_count", int(self.class_count))

    @property
    def n_features(self) -> int:
        return self.features.shape[0]

    @property
    def n_samples(self) -> int:
        return self.features.shape[1]

    @cached_property
    def class_sizes(self) -> np.ndarray:
        """Per-class sample counts n_1..n_C."""
        return np.bincount(self.labels - 1, minlength=self.class_count)

    @cached_property
    def class_indices(self) -> tuple[np.ndarray, ...]:
        """Global sample indices of each class, in ascending order."""
        return tuple(np.flatnonzero(self.labels == c) for c in range(1, self.class_count + 1))

    def subset(self, idx) -> "Dataset":
        idx = np.asarray(idx)
        return Dataset(self.features[:, idx], self.labels[idx], self.class_count)


def validate(dataset: Dataset) -> None:
    """Raise :class:`DatasetError` unless every dataset invariant holds."""
    X, labels, C = dataset.features, dataset.labels, dataset.class_count
    if X.ndim != 2:
        raise DatasetError(f"features must be 2-D, got shape {X.shape}")
    m, n = X.shape
    if m < 1:
        raise DatasetError("need at least one feature")
    if n < 2:
        raise DatasetError("need at least two samples")
    if labels.shape != (n,):
        raise DatasetError(f"labels has length {labels.size}, expected {n}")
    if C < 1:
        raise DatasetError("class_count must be positive")
    bad = np.flatnonzero((labels < 1) | (labels > C))
    if bad.size:
        i = int(bad[0])
        raise DatasetError(f"label out of range at sample {i}: {labels[i]} not in [1, {C}]")
    finite = np.isfinite(X)
    if not finite.all():
        f, s = np.argwhere(~finite)[0]
        raise DatasetError(f"non-finite feature at feature {f}, sample {s}")
    sizes = np.bincount(labels - 1, minlength=C)
    small = np.flatnonzero(sizes < 2)
    if small.size:
        c = int(small[0]) + 1
        raise DatasetError(f"class with fewer than 2 samples: class {c} has {sizes[c - 1]}")


def one_hot(dataset: Dataset) -> np.ndarray:
    """n x C zero-one label matrix with row i hot at column labels[i]."""
    n = dataset.n_samples
    Y = np.zeros((n, dataset.class_count))
    Y[np.arange(n), dataset.labels - 1] = 1.0
    return Y


def l21_norm(W) -> float:
    return float(np.sum(np.linalg.norm(W, axis=1)))


@dataclass(frozen=True, eq=False)
class Projection:
    """m x C projection; row l2-norms measure how much each feature is used."""

    matrix: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "matrix", _frozen(np.atleast_2d(self.matrix)))

    @cached_property
    def row_norms(self) -> np.ndarray:
        norms = np.linalg.norm(self.matrix, axis=1)
        norms.setflags(write=False)
        return norms

    @property
    def shape(self):
        return self.matrix.shape


def margins(T, labels) -> np.ndarray:
    """Per-row gap between the correct-class entry and the best other entry."""
    T = np.asarray(T, dtype=float)
    rows = np.arange(T.shape[0])
    idx = np.asarray(labels) - 1
    correct = T[rows, idx]
    others = T.copy()
    others[rows, idx] = -np.inf
    return correct - others.max(axis=1)


@dataclass(frozen=True, eq=False)
class TargetMatrix:
    """n x C regression target with a unit margin for the correct class."""

    matrix: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "matrix", _frozen(self.matrix))

    def satisfies_margin(self, labels, tol: float = 1e-9) -> bool:
        return bool(np.all(margins(self.matrix, labels) >= 1.0 - tol))


@dataclass(frozen=True)
class SolverConfig:
    """Hyperparameters and numerical safeguards for the alternating solver.

    lambda1 weights the adaptive graph term, lambda2 the l2,1 row-sparsity
    term.  ``rho`` is the row-norm threshold used when pruning features at
    prediction time.
    """

    lambda1: float = 0.1
    lambda2: float = 0.1
    max_iters: int = 50
    rel_tol: float = 1e-6
    knn_init: int = 5
    epsilon_dist: float = 1e-12
    epsilon_row: float = 1e-8
    rho: float = 1e-4
    seed: int = 0

    def __post_init__(self):
        if self.lambda1 < 0 or self.lambda2 < 0:
            raise ValueError("lambda1 and lambda2 must be nonnegative")
        if int(self.max_iters) < 1:
            raise ValueError("max_iters must be >= 1")
        if not self.rel_tol > 0:
            raise ValueError("rel_tol must be positive")
        if int(self.knn_init) < 1:
            raise ValueError("knn_init must be positive")
        if not (self.epsilon_dist > 0 and self.epsilon_row > 0):
            raise ValueError("epsilon_dist and epsilon_row must be positive")
        if self.rho < 0:
            raise ValueError("rho must be nonnegative")


@dataclass(frozen=True, eq=False)
class FitResult:
    projection: Projection
    target: TargetMatrix
    graphs: "object"  # alpr.graph.ClassGraph; typed loosely to avoid an import cycle
    objective_trace: tuple[float, ...]
    iterations_run: int
    train_embedding: np.ndarray
    train_labels: np.ndarray
    config: SolverConfig = field(default_factory=SolverConfig)
