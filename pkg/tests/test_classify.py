import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from alpr.classify import (ClassificationError, PrunedModel, accuracy, build_model, nearest_labels, predict,
                           predict_batch, prune)
from alpr.core import Projection, SolverConfig
from alpr.solver import fit

from conftest import random_dataset, two_blobs


def test_prune_zero_rho_is_identity(rng):
    W = Projection(rng.standard_normal((4, 3)))
    P, mask = prune(W, 0.0)
    np.testing.assert_array_equal(P.matrix, W.matrix)
    assert mask.all()


def test_prune_threshold():
    W = np.zeros((3, 2))
    W[0, 0], W[1, 1], W[2, 0] = 0.5, 1e-6, 0.3
    P, mask = prune(Projection(W), 1e-4)
    assert mask.tolist() == [True, False, True]
    assert np.all(P.matrix[1] == 0.0)
    np.testing.assert_array_equal(P.matrix[[0, 2]], W[[0, 2]])


def test_prune_everything_then_predict_errors(rng):
    W = Projection(rng.standard_normal((3, 2)))
    P, mask = prune(W, 1e3)
    assert not mask.any() and np.all(P.matrix == 0)
    model = PrunedModel(P, mask, np.zeros((2, 4)), [1, 1, 2, 2])
    with pytest.raises(ClassificationError, match="no features selected"):
        predict(model, np.ones(3))


def test_prune_negative_rho():
    with pytest.raises(ValueError):
        prune(Projection(np.eye(2)), -1.0)


def test_training_sample_gets_its_label(rng):
    ds = random_dataset(rng, 5, [6, 7, 8])
    r = fit(ds)
    model = build_model(r)
    for j in range(ds.n_samples):
        assert predict(model, ds.features[:, j]) == ds.labels[j]


def test_two_blobs_test_accuracy():
    rng = np.random.default_rng(5)
    train, test = two_blobs(rng, 40), two_blobs(rng, 100)
    model = build_model(fit(train))
    assert accuracy(predict_batch(model, test.features), test.labels) == 100.0


def test_ties_go_to_smallest_index():
    pts = np.array([[1.0, 0.0], [-1.0, 0.0], [1.0, 0.0]])
    assert nearest_labels(pts, [3, 1, 2], [[0.0, 0.0]]).tolist() == [3]
    assert nearest_labels(pts, [3, 1, 2], [[1.0, 0.0]]).tolist() == [3]


def test_rho_separated_norms_do_not_change_predictions(rng):
    W = rng.standard_normal((6, 3))
    W[[1, 4]] *= 1e-7
    W[[0, 2, 3, 5]] += 0.1 * np.sign(W[[0, 2, 3, 5]])
    train = rng.standard_normal((6, 30))
    labels = rng.integers(1, 4, size=30)
    query = rng.standard_normal((6, 50))
    preds = []
    for rho in (0.0, 1e-4):
        P, mask = prune(Projection(W), rho)
        preds.append(predict_batch(PrunedModel(P, mask, P.matrix.T @ train, labels, rho), query))
    np.testing.assert_array_equal(*preds)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_permutation_invariance(seed):
    rng = np.random.default_rng(seed)
    train = rng.standard_normal((4, 25))
    labels = rng.integers(1, 4, size=25)
    query = rng.standard_normal((4, 30))
    W = Projection(rng.standard_normal((4, 3)))
    perm = rng.permutation(25)
    a = predict_batch(PrunedModel(W, np.ones(4, bool), W.matrix.T @ train, labels), query)
    b = predict_batch(PrunedModel(W, np.ones(4, bool), W.matrix.T @ train[:, perm], labels[perm]), query)
    np.testing.assert_array_equal(a, b)


def test_build_model_rho_override(rng):
    ds = random_dataset(rng, 4, [6, 6])
    r = fit(ds, SolverConfig(rho=0.0))
    with pytest.raises(ValueError):
        build_model(r, rho=1.0)
    norms = r.projection.row_norms
    rho = float(np.sort(norms)[1])
    model = build_model(r, train=ds, rho=rho)
    assert model.n_selected == 3
    np.testing.assert_allclose(model.train_embedding, model.projection.matrix.T @ ds.features)


def test_accuracy_percent():
    assert accuracy([1, 2, 3, 1], [1, 2, 1, 1]) == 75.0
