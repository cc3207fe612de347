"""Sparse random projection baseline."""

import numpy as np
import pytest

from repen.data import Dataset
from repen.srp import srp_matrix, srp_project


class TestSrpMatrix:
    def test_density_one_gives_dense_sign_matrix(self):
        matrix = srp_matrix(50, 10, density=1.0, seed=3)
        scale = 1.0 / np.sqrt(10)
        assert np.all(np.isin(matrix, [scale, -scale]))

    def test_sparsity_matches_density(self):
        matrix = srp_matrix(2000, 100, density=0.1, seed=5)
        occupancy = np.count_nonzero(matrix) / matrix.size
        assert abs(occupancy - 0.1) < 0.01

    def test_entry_mean_near_zero(self):
        # Entry variance is 1/m; the mean of K entries has std 1/sqrt(m*K).
        m = 100
        matrix = srp_matrix(10000, m, density=0.05, seed=11)
        standard_error = 1.0 / np.sqrt(m * matrix.size)
        assert abs(matrix.mean()) < 3 * standard_error

    def test_deterministic(self):
        a = srp_matrix(100, 20, seed=42)
        b = srp_matrix(100, 20, seed=42)
        assert np.array_equal(a, b)

    def test_bad_density_rejected(self):
        with pytest.raises(ValueError, match="density"):
            srp_matrix(10, 2, density=1.5)


class TestSrpProject:
    def test_zero_vector_stays_zero(self, rng):
        ds = Dataset(np.vstack([np.zeros(40), rng.standard_normal(40)]))
        out = srp_project(ds, 8, seed=2)
        assert np.array_equal(out.values[0], np.zeros(8))

    def test_labels_carried(self, rng):
        ds = Dataset(rng.standard_normal((10, 30)), labels=rng.random(10) < 0.5)
        out = srp_project(ds, 5, seed=1)
        assert np.array_equal(out.labels, ds.labels)
        assert (out.n_objects, out.n_features) == (10, 5)

    def test_pairwise_distances_roughly_preserved(self, rng):
        # Johnson-Lindenstrauss sanity check at m = 100.
        n, d, m = 500, 1000, 100
        values = rng.standard_normal((n, d))
        ds = Dataset(values)
        projected = srp_project(ds, m, seed=7).values

        sample = rng.choice(n, size=(400, 2))
        sample = sample[sample[:, 0] != sample[:, 1]]
        exact = ((values[sample[:, 0]] - values[sample[:, 1]]) ** 2).sum(axis=1)
        approx = ((projected[sample[:, 0]] - projected[sample[:, 1]]) ** 2).sum(axis=1)
        rel_err = np.abs(approx - exact) / exact
        assert rel_err.mean() < 0.25

    def test_sparse_input_supported(self, rng):
        values = rng.standard_normal((20, 50))
        values[rng.random((20, 50)) < 0.8] = 0.0
        dense = Dataset(values)
        sparse = dense.as_sparse()
        a = srp_project(dense, 6, seed=9)
        b = srp_project(sparse, 6, seed=9)
        np.testing.assert_allclose(a.values, b.values, atol=1e-12)
