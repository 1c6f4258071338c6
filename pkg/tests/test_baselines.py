import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from alpr.baselines import NEAREST, LinearModel, fit_nc, fit_relsr, fit_ridge, ridge_objective
from alpr.classify import accuracy
from alpr.core import Dataset, one_hot
from alpr.retarget import retarget_matrix
from alpr.synthetic import TH1, TH2, generate, split

from conftest import random_dataset, two_blobs


def test_ridge_identity_limit():
    ds = Dataset(np.eye(6), [1, 1, 2, 2, 3, 3], 3)
    np.testing.assert_allclose(fit_ridge(ds, 1e-10).projection, one_hot(ds), atol=1e-9)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(1e-3, 10.0))
def test_ridge_stationary(seed, lam):
    rng = np.random.default_rng(seed)
    ds = random_dataset(rng, int(rng.integers(2, 10)), [5, 6, 7])
    X, Y = ds.features, one_hot(ds)
    W = fit_ridge(ds, lam).projection
    grad = 2 * X @ (X.T @ W - Y) + 2 * lam * W
    assert np.linalg.norm(grad) <= 1e-8 * max(1.0, np.linalg.norm(2 * X @ Y))


def test_ridge_finite_differences(rng):
    ds = random_dataset(rng, 5, [7, 8])
    X, Y, lam = ds.features, one_hot(ds), 0.1
    W = fit_ridge(ds, lam).projection
    base = ridge_objective(X, Y, W, lam)
    h = 1e-5
    for i in range(W.shape[0]):
        for j in range(W.shape[1]):
            for s in (h, -h):
                P = W.copy()
                P[i, j] += s
                assert ridge_objective(X, Y, P, lam) >= base - 1e-7


def test_lambda_must_be_positive(rng):
    ds = random_dataset(rng, 3, [4, 4])
    with pytest.raises(ValueError):
        fit_ridge(ds, 0.0)
    with pytest.raises(ValueError):
        fit_relsr(ds, -1.0)


def test_relsr_without_retarget_is_ridge(rng):
    ds = random_dataset(rng, 6, [9, 8, 7])
    for lam in (1e-3, 0.1, 5.0):
        np.testing.assert_allclose(fit_relsr(ds, lam, retarget=False).projection,
                                   fit_ridge(ds, lam).projection, atol=1e-8)


def test_relsr_two_blobs_margin():
    ds = two_blobs(np.random.default_rng(3))
    model = fit_relsr(ds, 0.1)
    T = retarget_matrix(ds.features.T @ model.projection, ds.labels)
    assert T.satisfies_margin(ds.labels)
    assert accuracy(model.predict(ds.features), ds.labels) == 100.0


def test_relsr_monotone():
    for seed in range(20):
        rng = np.random.default_rng(500 + seed)
        C = int(rng.integers(2, 6))
        ds = random_dataset(rng, int(rng.integers(2, 20)), list(rng.integers(3, 20, size=C)))
        trace = fit_relsr(ds, float(rng.choice([1e-3, 0.1, 1.0])), rel_tol=1e-14).objective_trace
        for a, b in zip(trace, trace[1:]):
            assert b <= a + 1e-9 * max(1.0, a)


def test_nc_memorizes(rng):
    ds = random_dataset(rng, 4, [5, 5, 5])
    np.testing.assert_array_equal(fit_nc(ds).predict(ds.features), ds.labels)


def test_nc_on_rings():
    th1 = split(generate(TH1), 500, 0)
    th2 = split(generate(TH2), 500, 0)
    acc1 = accuracy(fit_nc(th1[0]).predict(th1[1].features), th1[1].labels)
    acc2 = accuracy(fit_nc(th2[0]).predict(th2[1].features), th2[1].labels)
    assert acc1 > 80.0
    assert acc2 < 50.0


def test_nearest_rule_in_target_space(rng):
    ds = random_dataset(rng, 4, [5, 5])
    W = rng.standard_normal((4, 2))
    model = LinearModel(W, NEAREST, ds.features, ds.labels)
    np.testing.assert_array_equal(model.predict(ds.features), ds.labels)


def test_baselines_deterministic(rng):
    ds = random_dataset(rng, 5, [8, 8, 8])
    a, b = fit_relsr(ds, 0.1), fit_relsr(ds, 0.1)
    np.testing.assert_array_equal(a.projection, b.projection)
    assert a.objective_trace == b.objective_trace
