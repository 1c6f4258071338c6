"""Alternating minimization over the projection W, graph S and target T.

Each sweep does three block updates in a fixed order:

1. W from the regularized normal equations, with the l2,1 term replaced by
   its reweighted quadratic bound (D_ii = 1 / ||W_i||, previous W);
2. S by the closed-form simplex weights of :func:`alpr.graph.update_weights`;
3. T by row-wise margin retargeting of X'W.

Every step minimizes (or majorizes) the joint objective, so the per-sweep
objective trace is non-increasing.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .classify import prune
from .core import Dataset, FitResult, Projection, SolverConfig, TargetMatrix, l21_norm, one_hot, validate
from .graph import ClassGraph, assemble_scatter, init_knn, update_weights
from .retarget import retarget_matrix

log = logging.getLogger(__name__)


class SolverError(RuntimeError):
    pass


@dataclass(frozen=True, eq=False)
class IterationState:
    projection: Projection
    graph: ClassGraph
    target: TargetMatrix
    objective: float
    iter: int


def objective(dataset: Dataset, projection: Projection, graph: ClassGraph, target: TargetMatrix | np.ndarray,
              lambda1: float, lambda2: float, scatter: np.ndarray | None = None) -> float:
    """Normalized objective (fit + lambda1 * graph + lambda2 * l2,1) / ||X||_F^2."""
    X = dataset.features
    W = projection.matrix
    T = target.matrix if isinstance(target, TargetMatrix) else np.asarray(target)
    fit = float(np.sum((T - X.T @ W) ** 2))
    total = fit
    if lambda1:
        SW = assemble_scatter(dataset, graph) if scatter is None else scatter
        total += lambda1 * float(np.sum(W * (SW @ W)))
    if lambda2:
        total += lambda2 * l21_norm(W)
    return total / float(np.sum(X * X))


def reweighting_diagonal(projection: Projection, epsilon_row: float) -> np.ndarray:
    """Diagonal of D, D_ii = 1 / max(||W_i||, epsilon_row)."""
    return 1.0 / np.maximum(projection.row_norms, epsilon_row)


def _spd_solve(A, B):
    try:
        return scipy.linalg.cho_solve(scipy.linalg.cho_factor(A, lower=True, check_finite=False), B,
                                      check_finite=False)
    except np.linalg.LinAlgError:
        pass
    jitter = 1e-10 * max(np.trace(A), 1e-300) / A.shape[0]
    log.debug("Cholesky failed, retrying with diagonal jitter %.3g", jitter)
    try:
        A = A + jitter * np.eye(A.shape[0])
        return scipy.linalg.cho_solve(scipy.linalg.cho_factor(A, lower=True, check_finite=False), B,
                                      check_finite=False)
    except np.linalg.LinAlgError as exc:
        raise SolverError("system not positive definite") from exc


def system_matrix(dataset: Dataset, graph: ClassGraph, lambda1: float, lambda2: float,
                  epsilon_row: float, prev_projection: Projection | None, scatter=None):
    """Left-hand side X X' + lambda1 S_W + (lambda2 / 2) D and the D diagonal used."""
    X = dataset.features
    A = X @ X.T
    if lambda1:
        A = A + lambda1 * (assemble_scatter(dataset, graph) if scatter is None else scatter)
    d = None
    if lambda2:
        if prev_projection is None:
            raise ValueError("lambda2 > 0 needs the previous projection for D")
        d = reweighting_diagonal(prev_projection, epsilon_row)
        A = A + np.diag(0.5 * lambda2 * d)
    return A, d


def update_projection(dataset: Dataset, graph: ClassGraph, target: TargetMatrix | np.ndarray,
                      lambda1: float, lambda2: float, epsilon_row: float = 1e-8,
                      prev_projection: Projection | None = None, scatter=None) -> Projection:
    """W = (X X' + lambda1 S_W + (lambda2 / 2) D)^{-1} X T via Cholesky.

    D is evaluated at ``prev_projection``.  With lambda2 == 0 the D term is
    dropped and ``prev_projection`` is not needed.
    """
    if lambda1 < 0 or lambda2 < 0:
        raise ValueError("lambda1 and lambda2 must be nonnegative")
    T = target.matrix if isinstance(target, TargetMatrix) else np.asarray(target, dtype=float)
    A, _ = system_matrix(dataset, graph, lambda1, lambda2, epsilon_row, prev_projection, scatter)
    return Projection(_spd_solve(A, dataset.features @ T))


def stationarity_residual(dataset: Dataset, graph: ClassGraph, target, projection: Projection,
                          lambda1: float, lambda2: float, epsilon_row: float,
                          prev_projection: Projection | None) -> float:
    """||X(X'W - T) + lambda1 S_W W + (lambda2/2) D W||_F / ||X T||_F, D from ``prev_projection``."""
    X = dataset.features
    T = target.matrix if isinstance(target, TargetMatrix) else np.asarray(target, dtype=float)
    W = projection.matrix
    R = X @ (X.T @ W - T)
    if lambda1:
        R += lambda1 * assemble_scatter(dataset, graph) @ W
    if lambda2:
        R += 0.5 * lambda2 * reweighting_diagonal(prev_projection, epsilon_row)[:, None] * W
    return float(np.linalg.norm(R) / np.linalg.norm(X @ T))


def initial_projection(m: int, C: int, seed: int) -> Projection:
    rng = np.random.default_rng(seed)
    return Projection(rng.standard_normal((m, C)) / np.sqrt(m))


def iterate(dataset: Dataset, config: SolverConfig):
    """Yield an :class:`IterationState` after every full W -> S -> T sweep.

    Runs until ``config.max_iters`` sweeps; stopping on the relative
    objective change is left to the caller (see :func:`fit`).
    """
    validate(dataset)
    W = initial_projection(dataset.n_features, dataset.class_count, config.seed)
    T = TargetMatrix(one_hot(dataset))
    S = init_knn(dataset, config.knn_init)
    SW = assemble_scatter(dataset, S) if config.lambda1 else None
    for it in range(1, config.max_iters + 1):
        W = update_projection(dataset, S, T, config.lambda1, config.lambda2, config.epsilon_row, W, SW)
        S = update_weights(dataset, W, config.epsilon_dist)
        SW = assemble_scatter(dataset, S) if config.lambda1 else None
        T = retarget_matrix(dataset.features.T @ W.matrix, dataset.labels)
        obj = objective(dataset, W, S, T, config.lambda1, config.lambda2, SW)
        yield IterationState(W, S, T, obj, it)


def fit(dataset: Dataset, config: SolverConfig | None = None) -> FitResult:
    """Run the alternating solver and package the converged model.

    Stops when the relative objective change falls below ``config.rel_tol``
    or after ``config.max_iters`` sweeps.
    """
    config = config or SolverConfig()
    trace = []
    state = None
    for state in iterate(dataset, config):
        trace.append(state.objective)
        if len(trace) > 1:
            prev = trace[-2]
            if abs(prev - trace[-1]) < config.rel_tol * max(abs(prev), np.finfo(float).tiny):
                break
    pruned, _ = prune(state.projection, config.rho)
    embedding = pruned.matrix.T @ dataset.features
    return FitResult(
        projection=state.projection,
        target=state.target,
        graphs=state.graph,
        objective_trace=tuple(trace),
        iterations_run=state.iter,
        train_embedding=embedding,
        train_labels=dataset.labels.copy(),
        config=config,
    )
