import logging

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from alpr.core import margins
from alpr.retarget import qp_oracle, retarget_matrix, retarget_row

import alpr.retarget as retarget_mod

EXAMPLES = [
    ([2.0, 0.5], 1, [2.0, 0.5]),
    ([0.0, 0.0], 1, [0.5, -0.5]),
    # both constraints active: 3 t_1 = 0 + 1.5 + 0.8
    ([0.0, 0.5, -0.2], 1, [23 / 30, -7 / 30, -7 / 30]),
]


@pytest.mark.parametrize("g, h, expected", EXAMPLES)
def test_retarget_row_examples(g, h, expected):
    np.testing.assert_allclose(retarget_row(g, h), expected, atol=1e-12)


@pytest.mark.parametrize("g, h, expected", EXAMPLES)
def test_qp_oracle_examples(g, h, expected):
    np.testing.assert_allclose(qp_oracle(g, h), expected, atol=1e-12)


def test_errors():
    with pytest.raises(ValueError, match="C < 2"):
        retarget_row([1.0], 1)
    with pytest.raises(ValueError, match="C too large"):
        qp_oracle(np.zeros(17), 1)


def test_oracle_sweep():
    rng = np.random.default_rng(7)
    for _ in range(1000):
        C = int(rng.integers(2, 9))
        g = rng.normal(scale=rng.choice([0.1, 1.0, 5.0]), size=C)
        h = int(rng.integers(1, C + 1))
        t, ref = retarget_row(g, h), qp_oracle(g, h)
        np.testing.assert_allclose(t, ref, atol=1e-6, rtol=0)
        assert abs(np.sum((t - g) ** 2) - np.sum((ref - g) ** 2)) <= 1e-8
        assert margins(t[None, :], [h])[0] >= 1 - 1e-9


rows = st.integers(2, 8).flatmap(
    lambda C: st.tuples(st.lists(st.floats(-10, 10), min_size=C, max_size=C), st.integers(1, C)))


@settings(max_examples=300)
@given(rows)
def test_feasible_and_idempotent(row):
    g, h = row
    t = retarget_row(g, h)
    assert margins(t[None, :], [h])[0] >= 1 - 1e-9
    np.testing.assert_allclose(retarget_row(t, h), t, atol=1e-10)


@settings(max_examples=200)
@given(rows, st.floats(-100, 100))
def test_translation_equivariance(row, c):
    g, h = row
    g = np.asarray(g)
    np.testing.assert_allclose(retarget_row(g + c, h), retarget_row(g, h) + c, atol=1e-9)


def test_matrix_identity_when_feasible():
    G = np.array([[3.0, 0.0, 1.0], [-1.0, 2.0, 0.5]])
    T = retarget_matrix(G, [1, 2])
    np.testing.assert_array_equal(T.matrix, G)


def test_matrix_zero_output():
    G = np.zeros((4, 2))
    T = retarget_matrix(G, [1, 2, 1, 2]).matrix
    np.testing.assert_allclose(T, [[0.5, -0.5], [-0.5, 0.5]] * 2)


def test_matrix_random_against_oracle():
    rng = np.random.default_rng(11)
    G = rng.standard_normal((50, 5))
    labels = rng.integers(1, 6, size=50)
    T = retarget_matrix(G, labels)
    assert T.satisfies_margin(labels)
    for i in range(50):
        np.testing.assert_allclose(T.matrix[i], qp_oracle(G[i], int(labels[i])), atol=1e-8)


def test_matrix_matches_row_function():
    rng = np.random.default_rng(3)
    G = rng.standard_normal((30, 12)) * 3
    labels = rng.integers(1, 13, size=30)
    T = retarget_matrix(G, labels, chunk=7).matrix
    for i in range(30):
        np.testing.assert_allclose(T[i], retarget_row(G[i], int(labels[i])), atol=1e-12)


def test_fallback_to_oracle(monkeypatch, caplog):
    def broken(G, hidx):
        return np.zeros_like(G)

    monkeypatch.setattr(retarget_mod, "_closed_form", broken)
    with caplog.at_level(logging.WARNING, logger="alpr.retarget"):
        t = retarget_row([0.0, 0.5, -0.2], 1)
        T = retarget_matrix(np.array([[0.0, 0.0]]), [1])
    np.testing.assert_allclose(t, [23 / 30, -7 / 30, -7 / 30], atol=1e-12)
    np.testing.assert_allclose(T.matrix, [[0.5, -0.5]])
    assert "using oracle" in caplog.text
