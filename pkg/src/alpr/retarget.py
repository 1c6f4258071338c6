"""Margin-constrained target update.

For a regression output row g and correct class h, find the closest t (in
squared Euclidean distance) with t_h - t_j >= 1 for every j != h.  The
closed form shifts t_h up by Delta and clips every competitor to at most
g_h + Delta - 1, where Delta is the root of the piecewise-linear

    Gamma'(x) = 2 (x + sum_{j != h} min(x - v_j, 0)),   v_j = 1 + g_j - g_h.

Labels ``h`` are 1-based, matching dataset labels.
"""
from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass

import numpy as np

from .core import TargetMatrix

log = logging.getLogger(__name__)

ORACLE_MAX_CLASSES = 16


@dataclass(frozen=True)
class RetargetRow:
    g: np.ndarray
    h: int


def _check(g, h):
    g = np.asarray(g, dtype=float)
    if g.ndim != 1:
        raise ValueError("g must be a vector")
    C = g.size
    if C < 2:
        raise ValueError("C < 2")
    if not 1 <= h <= C:
        raise ValueError(f"class index {h} out of range 1..{C}")
    if not np.all(np.isfinite(g)):
        raise ValueError("g must be finite")
    return g, C


def _closed_form(G, hidx):
    """Vectorized closed form over rows; G is (r, C), hidx 0-based (r,)."""
    r, C = G.shape
    rows = np.arange(r)
    gh = G[rows, hidx]
    V = 1.0 + G - gh[:, None]
    others = np.ones((r, C), dtype=bool)
    others[rows, hidx] = False
    # Gamma'(v_i) for every candidate i: 2 (v_i + sum_{j != h} min(v_i - v_j, 0))
    diff = np.minimum(V[:, :, None] - V[:, None, :], 0.0)
    diff *= others[:, None, :]
    gamma = 2.0 * (V + diff.sum(axis=2))
    active = others & (gamma > 0.0)
    delta = (V * active).sum(axis=1) / (1.0 + active.sum(axis=1))
    T = G + np.minimum(delta[:, None] - V, 0.0)
    T[rows, hidx] = gh + delta
    return T


def _kkt_ok(T, G, hidx, tol):
    """Row-wise KKT certificate (feasibility, dual sign, complementarity, stationarity)."""
    T = np.atleast_2d(T)
    G = np.atleast_2d(G)
    hidx = np.atleast_1d(hidx)
    r, C = G.shape
    rows = np.arange(r)
    others = np.ones((r, C), dtype=bool)
    others[rows, hidx] = False
    scale = tol * (1.0 + np.max(np.abs(G), axis=1))
    th = T[rows, hidx]
    gap = np.where(others, th[:, None] - T, np.inf)
    mu = np.where(others, 2.0 * (G - T), 0.0)  # multipliers of t_h - t_j >= 1
    feasible = np.all(gap >= 1.0 - scale[:, None], axis=1)
    dual = np.all(mu >= -scale[:, None], axis=1)
    comp = np.all(np.minimum(np.abs(mu), np.abs(gap - 1.0)) <= scale[:, None], axis=1)
    stat = np.abs(2.0 * (th - G[rows, hidx]) - mu.sum(axis=1)) <= scale * C
    return feasible & dual & comp & stat


def retarget_row(g, h: int, check_tol: float = 1e-9) -> np.ndarray:
    """Closest vector to ``g`` whose class-``h`` entry beats all others by >= 1.

    The closed-form answer is certified by its KKT conditions; if that ever
    fails, the active-set oracle result is returned instead and the input is
    logged.
    """
    g, C = _check(g, h)
    t = _closed_form(g[None, :], np.array([h - 1]))[0]
    if not _kkt_ok(t, g, h - 1, check_tol)[0]:
        log.warning("closed-form retarget failed KKT check, using oracle: g=%r h=%d", g.tolist(), h)
        t = qp_oracle(g, h)
    return t


def retarget_matrix(regression_output, labels, check_tol: float = 1e-9, chunk: int = 4096) -> TargetMatrix:
    """Apply :func:`retarget_row` to every row of an n x C output matrix."""
    G = np.asarray(regression_output, dtype=float)
    labels = np.asarray(labels)
    n, C = G.shape
    if labels.shape != (n,):
        raise ValueError("labels length does not match rows")
    if C < 2:
        raise ValueError("C < 2")
    hidx = labels - 1
    # bound the (rows, C, C) temporary
    step = max(1, min(chunk, 2**24 // max(C * C, 1)))
    T = np.empty_like(G)
    for s in range(0, n, step):
        T[s:s + step] = _closed_form(G[s:s + step], hidx[s:s + step])
    for i in np.flatnonzero(~_kkt_ok(T, G, hidx, check_tol)):
        log.warning("closed-form retarget failed KKT check at row %d, using oracle", i)
        T[i] = qp_oracle(G[i], int(labels[i]))
    return TargetMatrix(T)


def qp_oracle(g, h: int) -> np.ndarray:
    """Solve the margin QP by enumerating active constraint sets.

    For each subset A of competitors, pin t_j = t_h - 1 on A and t_j = g_j
    elsewhere, with t_h the average of g_h and (g_j + 1) over A.  Among
    candidates meeting the KKT conditions the one with least objective wins.
    """
    g, C = _check(g, h)
    if C > ORACLE_MAX_CLASSES:
        raise ValueError("C too large for enumeration")
    h0 = h - 1
    comp = [j for j in range(C) if j != h0]
    scale = 1.0 + np.max(np.abs(g))
    tol = 1e-12 * scale
    best, best_obj = None, np.inf
    for size in range(len(comp) + 1):
        for A in itertools.combinations(comp, size):
            A = list(A)
            th = (g[h0] + np.sum(g[A] + 1.0)) / (1 + len(A))
            t = g.copy()
            t[h0] = th
            t[A] = th - 1.0
            inactive = [j for j in comp if j not in A]
            if np.any(th - g[inactive] < 1.0 - tol):
                continue
            if np.any(g[A] - t[A] < -tol):  # multiplier 2 (g_j - t_j) >= 0
                continue
            obj = float(np.sum((t - g) ** 2))
            if obj < best_obj:
                best, best_obj = t, obj
    if best is None:  # pragma: no cover - the QP always has a KKT point
        raise RuntimeError("no KKT point found")
    return best
