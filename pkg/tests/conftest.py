import numpy as np
import pytest

from alpr.core import Dataset


def random_dataset(rng, m, class_sizes, scale=1.0):
    labels = np.concatenate([np.full(k, c) for c, k in enumerate(class_sizes, start=1)])
    X = scale * rng.standard_normal((m, labels.size))
    return Dataset(X, labels, len(class_sizes))


def two_blobs(rng, per_class=40, sep=8.0):
    """Two well-separated Gaussian blobs in the plane (columns are samples)."""
    a = rng.standard_normal((2, per_class)) * 0.5 + np.array([[sep], [0.0]])
    b = rng.standard_normal((2, per_class)) * 0.5 + np.array([[0.0], [sep]])
    return Dataset(np.hstack([a, b]), np.r_[np.ones(per_class, int), np.full(per_class, 2)], 2)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


ACCEPTANCE = []


def record_criterion(number, ok, detail):
    ACCEPTANCE.append((number, bool(ok), detail))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number, ok, detail in sorted(ACCEPTANCE):
        terminalreporter.write_line(f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}")
