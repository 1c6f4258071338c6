import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from alpr.core import Dataset, DatasetError, Projection, SolverConfig, TargetMatrix, margins, one_hot, validate


@pytest.mark.parametrize("labels, C, expected", [
    ([1, 2], 2, [[1, 0], [0, 1]]),
    ([2, 2, 1], 2, [[0, 1], [0, 1], [1, 0]]),
    ([3], 3, [[0, 0, 1]]),
])
def test_one_hot_examples(labels, C, expected):
    ds = Dataset(np.zeros((1, len(labels))), labels, C)
    np.testing.assert_array_equal(one_hot(ds), expected)


@given(st.lists(st.integers(1, 6), min_size=1, max_size=50))
def test_one_hot_argmax_recovers_labels(labels):
    C = max(labels)
    ds = Dataset(np.zeros((2, len(labels))), labels, C)
    Y = one_hot(ds)
    assert np.all(Y.sum(axis=1) == 1)
    np.testing.assert_array_equal(Y.argmax(axis=1) + 1, labels)


def test_validate_ok():
    validate(Dataset(np.arange(8.0).reshape(2, 4), [1, 1, 2, 2], 2))


@pytest.mark.parametrize("X, labels, C, msg", [
    (np.zeros((1, 2)), [1, 2], 2, "class with fewer than 2 samples"),
    (np.array([[0.0, np.nan, 1.0, 2.0]]), [1, 1, 2, 2], 2, "non-finite feature"),
    (np.zeros((1, 4)), [1, 1, 3, 3], 2, "label out of range"),
    (np.zeros((1, 4)), [0, 0, 1, 1], 2, "label out of range"),
])
def test_validate_errors(X, labels, C, msg):
    with pytest.raises(DatasetError, match=msg):
        validate(Dataset(X, labels, C))


def test_validate_names_offending_index():
    X = np.zeros((2, 4))
    X[1, 2] = np.inf
    with pytest.raises(DatasetError, match="feature 1, sample 2"):
        validate(Dataset(X, [1, 1, 2, 2], 2))


def test_dataset_is_immutable():
    ds = Dataset(np.ones((2, 4)), [1, 1, 2, 2], 2)
    with pytest.raises(ValueError):
        ds.features[0, 0] = 5.0
    assert ds.n_features == 2 and ds.n_samples == 4
    np.testing.assert_array_equal(ds.class_sizes, [2, 2])


@settings(max_examples=50)
@given(st.integers(1, 8), st.integers(1, 6), st.integers(0, 2**32 - 1))
def test_projection_row_norms(m, C, seed):
    W = np.random.default_rng(seed).standard_normal((m, C)) * 10.0 ** np.random.default_rng(seed).integers(-5, 5)
    P = Projection(W)
    fresh = np.sqrt((W ** 2).sum(axis=1))
    np.testing.assert_allclose(P.row_norms, fresh, rtol=1e-12, atol=0)


def test_target_margin_check():
    T = TargetMatrix([[1.0, 0.0], [0.0, 0.5]])
    assert T.satisfies_margin([1, 1]) is False
    assert T.satisfies_margin([1, 2]) is False
    np.testing.assert_allclose(margins(T.matrix, [1, 2]), [1.0, 0.5])


@pytest.mark.parametrize("kwargs", [dict(max_iters=0), dict(rel_tol=0.0), dict(epsilon_row=0.0),
                                    dict(epsilon_dist=-1.0), dict(lambda1=-1.0)])
def test_solver_config_rejects(kwargs):
    with pytest.raises(ValueError):
        SolverConfig(**kwargs)
