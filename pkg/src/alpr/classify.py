"""Feature pruning on a learned projection followed by nearest-neighbor labels.

Rows of W whose l2-norm falls below ``rho`` are zeroed; training and test
samples are then mapped with the pruned W and each test sample takes the
label of its Euclidean-nearest training embedding.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist

from .core import Dataset, FitResult, Projection


class ClassificationError(RuntimeError):
    pass


@dataclass(frozen=True, eq=False)
class PrunedModel:
    projection: Projection
    selected_mask: np.ndarray
    train_embedding: np.ndarray  # C x n
    train_labels: np.ndarray
    rho: float = 0.0

    def __post_init__(self):
        for name in ("selected_mask", "train_embedding", "train_labels"):
            a = np.array(getattr(self, name), copy=True)
            a.setflags(write=False)
            object.__setattr__(self, name, a)

    @property
    def n_selected(self) -> int:
        return int(self.selected_mask.sum())


def prune(projection: Projection, rho: float) -> tuple[Projection, np.ndarray]:
    """Zero every row with norm < rho; return the pruned projection and the kept-row mask."""
    if rho < 0:
        raise ValueError("rho must be nonnegative")
    mask = projection.row_norms >= rho
    W = np.where(mask[:, None], projection.matrix, 0.0)
    return Projection(W), mask


def build_model(fit: FitResult, train: Dataset | None = None, rho: float | None = None) -> PrunedModel:
    """Classifier from a fit; pass ``train``/``rho`` to re-embed with another threshold."""
    rho = fit.config.rho if rho is None else rho
    W, mask = prune(fit.projection, rho)
    if train is None:
        if rho != fit.config.rho:
            raise ValueError("re-pruning with a new rho needs the training dataset")
        embedding, labels = fit.train_embedding, fit.train_labels
    else:
        embedding, labels = W.matrix.T @ train.features, train.labels
    return PrunedModel(W, mask, embedding, labels, rho)


def nearest_labels(train_points, train_labels, query_points, chunk: int = 2048) -> np.ndarray:
    """Label of the nearest training point for each query (rows are points).

    Exact squared distances; ties resolved toward the smaller training index.
    """
    train_points = np.asarray(train_points, dtype=float)
    query_points = np.atleast_2d(np.asarray(query_points, dtype=float))
    out = np.empty(query_points.shape[0], dtype=np.int64)
    for s in range(0, query_points.shape[0], chunk):
        d = cdist(query_points[s:s + chunk], train_points, "sqeuclidean")
        out[s:s + chunk] = np.asarray(train_labels)[np.argmin(d, axis=1)]
    return out


def predict_batch(model: PrunedModel, samples) -> np.ndarray:
    """Predict labels for the columns of an m x k sample matrix."""
    if model.n_selected == 0:
        raise ClassificationError("no features selected")
    if model.train_embedding.size == 0:
        raise ClassificationError("empty training embedding")
    samples = np.asarray(samples, dtype=float)
    if samples.ndim == 1:
        samples = samples[:, None]
    Z = model.projection.matrix.T @ samples
    return nearest_labels(model.train_embedding.T, model.train_labels, Z.T)


def predict(model: PrunedModel, sample) -> int:
    return int(predict_batch(model, np.asarray(sample, dtype=float).reshape(-1, 1))[0])


def accuracy(predicted, truth) -> float:
    """Percentage of matching labels."""
    predicted, truth = np.asarray(predicted), np.asarray(truth)
    return 100.0 * float(np.mean(predicted == truth))
