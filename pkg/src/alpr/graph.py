"""Per-class adaptive neighbor graphs.

Each class i carries a dense n_i x n_i weight matrix whose rows lie on the
probability simplex (zero diagonal, nonnegative, unit row sum).  The graph
enters the projection update only through the weighted scatter matrix built
by :func:`assemble_scatter`.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist

from .core import Dataset, Projection


@dataclass(frozen=True, eq=False)
class ClassGraph:
    """Neighbor weights for every class.

    ``weights[c]`` is the matrix for class c+1 and ``members[c]`` maps its
    within-class positions to global sample indices.
    """

    weights: tuple[np.ndarray, ...]
    members: tuple[np.ndarray, ...]

    def __post_init__(self):
        ws = []
        for w in self.weights:
            w = np.array(w, dtype=float)
            w.setflags(write=False)
            ws.append(w)
        object.__setattr__(self, "weights", tuple(ws))
        object.__setattr__(self, "members", tuple(np.asarray(m) for m in self.members))

    def dense(self, n: int) -> np.ndarray:
        """Scatter the block weights into one n x n matrix (for inspection)."""
        S = np.zeros((n, n))
        for w, idx in zip(self.weights, self.members):
            S[np.ix_(idx, idx)] = w
        return S


def init_knn(dataset: Dataset, k: int = 5) -> ClassGraph:
    """k-nearest-neighbor graph inside each class, rows normalized to sum to 1.

    Each sample gives weight 1/k' to its k' = min(k, n_i - 1) nearest
    classmates in the original feature space.  Distance ties go to the
    smaller within-class index.
    """
    if k < 1:
        raise ValueError("k must be positive")
    weights = []
    for idx in dataset.class_indices:
        Xi = dataset.features[:, idx].T
        ni = len(idx)
        kk = min(k, ni - 1)
        d = cdist(Xi, Xi, "sqeuclidean")
        np.fill_diagonal(d, np.inf)
        order = np.argsort(d, axis=1, kind="stable")[:, :kk]
        S = np.zeros((ni, ni))
        S[np.arange(ni)[:, None], order] = 1.0 / kk
        weights.append(S)
    return ClassGraph(tuple(weights), dataset.class_indices)


def update_weights(dataset: Dataset, projection: Projection, epsilon_dist: float = 1e-12) -> ClassGraph:
    """Optimal simplex weights for fixed W: S_jk proportional to 1/||W'x_j - W'x_k||^2.

    The sum runs over every classmate, not just the initial k-NN set.
    Squared distances are floored at ``epsilon_dist``.
    """
    W = projection.matrix
    if W.shape[0] != dataset.n_features:
        raise ValueError(f"projection has {W.shape[0]} rows, dataset has {dataset.n_features} features")
    weights = []
    for idx in dataset.class_indices:
        Z = (W.T @ dataset.features[:, idx]).T
        d = np.maximum(cdist(Z, Z, "sqeuclidean"), epsilon_dist)
        inv = 1.0 / d
        np.fill_diagonal(inv, 0.0)
        weights.append(inv / inv.sum(axis=1, keepdims=True))
    return ClassGraph(tuple(weights), dataset.class_indices)


def assemble_scatter(dataset: Dataset, graph: ClassGraph) -> np.ndarray:
    """S_W = sum_i n_i sum_{j != k} (S^i_jk)^2 (x_j - x_k)(x_j - x_k)^T.

    Ordered pairs (j, k) and (k, j) are both counted.  Computed through the
    Laplacian identity sum_jk A_jk (x_j - x_k)(x_j - x_k)^T = X (D_r + D_c - A - A^T) X^T.
    """
    m = dataset.n_features
    SW = np.zeros((m, m))
    for S, idx in zip(graph.weights, graph.members):
        A = len(idx) * S * S
        L = np.diag(A.sum(axis=1) + A.sum(axis=0)) - A - A.T
        Xi = dataset.features[:, idx]
        SW += Xi @ L @ Xi.T
    return 0.5 * (SW + SW.T)


def graph_penalty(dataset: Dataset, projection: Projection, graph: ClassGraph) -> float:
    """Pairwise form of Tr(W' S_W W); slow, used to cross-check the scatter identity."""
    W = projection.matrix
    total = 0.0
    for S, idx in zip(graph.weights, graph.members):
        Z = (W.T @ dataset.features[:, idx]).T
        total += len(idx) * float(np.sum(S * S * cdist(Z, Z, "sqeuclidean")))
    return total


def project_simplex(v) -> np.ndarray:
    """Euclidean projection onto {a : a >= 0, sum(a) = 1} (sort-and-threshold)."""
    v = np.asarray(v, dtype=float)
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - 1.0
    ks = np.arange(1, v.size + 1)
    r = np.nonzero(u - css / ks > 0)[0][-1]
    tau = css[r] / (r + 1)
    return np.maximum(v - tau, 0.0)


def simplex_oracle(b, tol: float = 1e-12, max_iter: int = 200_000) -> np.ndarray:
    """Minimize sum(a**2 * b) over the simplex by accelerated projected gradient.

    Independent of the closed form used in :func:`update_weights`; meant for
    verification only.  Stops when the projected-gradient step at the current
    iterate moves it by less than ``tol``.
    """
    b = np.asarray(b, dtype=float)
    if b.ndim != 1 or b.size == 0:
        raise ValueError("b must be a non-empty vector")
    if np.any(~(b > 0)):
        raise ValueError("non-positive b entry")
    q = b.size
    step = 1.0 / (2.0 * b.max())

    def pg(x):
        return project_simplex(x - step * 2.0 * x * b)

    a = np.full(q, 1.0 / q)
    y = a.copy()
    t = 1.0
    for _ in range(max_iter):
        plain = pg(a)
        if np.max(np.abs(plain - a)) < tol:
            break
        a_next = pg(y)
        if np.sum(a_next * a_next * b) > np.sum(plain * plain * b):
            # momentum overshot: restart from a plain step
            a_next, t_next, y = plain, 1.0, plain
        else:
            t_next = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * t * t))
            y = a_next + ((t - 1.0) / t_next) * (a_next - a)
        a, t = a_next, t_next
    return a
