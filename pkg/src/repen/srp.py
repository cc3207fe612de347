"""Sparse random projection baseline (Achlioptas/Li construction).

Projection matrix entries take the value +sqrt(s/m) with probability
1/(2s), -sqrt(s/m) with probability 1/(2s), and 0 otherwise, where
s = 1/density. Entries have mean zero and variance 1/m, so squared
distances are preserved in expectation. The default density 1/sqrt(D) is
the usual very-sparse heuristic.
"""

from __future__ import annotations

from typing import Optional

import numpy as np

from .data import Dataset


def srp_matrix(
    n_features: int, m: int, density: Optional[float] = None, seed: int = 0
) -> np.ndarray:
    """Draw a (D, m) sparse random projection matrix, deterministic per seed."""
    if m < 1:
        raise ValueError(f"m >= 1 required, got {m}")
    if density is None:
        density = 1.0 / np.sqrt(n_features)
    if not 0.0 < density <= 1.0:
        raise ValueError(f"density in (0, 1] required, got {density}")
    s = 1.0 / density
    scale = np.sqrt(s / m)
    rng = np.random.default_rng(seed)
    u = rng.random((n_features, m))
    matrix = np.zeros((n_features, m))
    half = 1.0 / (2.0 * s)
    matrix[u < half] = scale
    matrix[u > 1.0 - half] = -scale
    return matrix


def srp_project(
    dataset: Dataset, m: int, density: Optional[float] = None, seed: int = 0
) -> Dataset:
    """Project a dataset to m dimensions; labels carry through."""
    matrix = srp_matrix(dataset.n_features, m, density=density, seed=seed)
    projected = np.asarray(dataset.values @ matrix)
    return Dataset(projected, dataset.labels, dataset.known_outliers)
