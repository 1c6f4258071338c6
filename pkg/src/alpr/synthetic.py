"""Three concentric rings in the plane plus one uniform noise feature."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Dataset

RING_RADII = (1.0, 2.0, 3.0)


@dataclass(frozen=True)
class ThreeRingSpec:
    samples_per_class: int = 1000
    noise_amplitude: float = 20.0
    radial_sigma: float = 0.1
    seed: int = 0

    def __post_init__(self):
        if self.samples_per_class < 1:
            raise ValueError("samples_per_class must be positive")
        if self.noise_amplitude < 0 or self.radial_sigma < 0:
            raise ValueError("noise_amplitude and radial_sigma must be nonnegative")


TH1 = ThreeRingSpec(noise_amplitude=20.0)
TH2 = ThreeRingSpec(noise_amplitude=2000.0)


def generate(spec: ThreeRingSpec) -> Dataset:
    """Sample the rings; features are (r cos t, r sin t, u), u ~ U(-A, A)."""
    rng = np.random.default_rng(spec.seed)
    k = spec.samples_per_class
    cols, labels = [], []
    for c, R in enumerate(RING_RADII, start=1):
        theta = rng.uniform(0.0, 2.0 * np.pi, k)
        r = R + spec.radial_sigma * rng.standard_normal(k)
        u = rng.uniform(-spec.noise_amplitude, spec.noise_amplitude, k)
        cols.append(np.vstack([r * np.cos(theta), r * np.sin(theta), u]))
        labels.append(np.full(k, c))
    return Dataset(np.hstack(cols), np.concatenate(labels), len(RING_RADII))


def split_indices(dataset: Dataset, train_per_class: int, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """Sorted global indices of a per-class random train/test split."""
    sizes = dataset.class_sizes
    if train_per_class < 1 or train_per_class >= sizes.min():
        raise ValueError(f"train_per_class too large: {train_per_class} with smallest class of {sizes.min()}")
    rng = np.random.default_rng(seed)
    train = []
    for idx in dataset.class_indices:
        train.append(rng.choice(idx, size=train_per_class, replace=False))
    train = np.sort(np.concatenate(train))
    test = np.setdiff1d(np.arange(dataset.n_samples), train)
    return train, test


def split(dataset: Dataset, train_per_class: int, seed: int) -> tuple[Dataset, Dataset]:
    """Random per-class split; the remainder of each class forms the test set."""
    train, test = split_indices(dataset, train_per_class, seed)
    return dataset.subset(train), dataset.subset(test)
