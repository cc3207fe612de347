"""Random nearest-neighbor-distance outlier scoring with a bagging ensemble.

Each ensemble member draws a small uniform subsample of the data; an
object's outlierness is its squared Euclidean distance to the nearest
subsample member, averaged over the ensemble. Squared distance preserves
the Euclidean rank order and avoids square roots.

An object never counts as its own nearest neighbor: when a query belongs to
the subsample it is excluded from the candidates, and if the exclusion
empties the subsample the member contributes distance 0 for that object.

Backends: ``brute_force`` computes distances via the expansion
||a - b||^2 = ||a||^2 + ||b||^2 - 2<a, b> with precomputed norms (this is
the only kernel sparse data needs); ``kd_tree`` indexes each subsample once
and answers all queries from the index, but only up to KD_MAX_DIM
dimensions, beyond which indexing stops paying off and the brute-force
kernel is used instead.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.sparse as sp
from scipy.spatial import cKDTree

from .data import Dataset, OutlierScores, RepresentationModel

# Dimension limit for k-d-tree indexing; higher-dimensional inputs fall back
# to the brute-force kernel.
KD_MAX_DIM = 30

_BACKENDS = ("brute_force", "kd_tree")


@dataclass
class SpConfig:
    """Detector settings: subsample size, ensemble size, backend, seed."""

    subsample_size: int = 8
    ensemble_size: int = 50
    backend: str = "brute_force"
    rng_seed: int = 0

    def validate(self) -> None:
        if self.subsample_size < 1:
            raise ValueError(f"subsample_size >= 1 required, got {self.subsample_size}")
        if self.ensemble_size < 1:
            raise ValueError(f"ensemble_size >= 1 required, got {self.ensemble_size}")
        if self.backend not in _BACKENDS:
            raise ValueError(f"backend must be one of {_BACKENDS}, got {self.backend!r}")


def nn_dist(query, subsample, query_index=None, subsample_indices=None) -> float:
    """Minimum squared Euclidean distance from ``query`` to the subsample.

    When both ``query_index`` and ``subsample_indices`` are given, any
    subsample member with the query's own index is excluded; if that leaves
    no candidates the distance is 0.

    Raises:
        ValueError: on an empty subsample or mismatched dimensions.
    """
    query = np.asarray(query, dtype=np.float64)
    members = np.asarray(subsample, dtype=np.float64)
    if members.ndim == 1:
        members = members.reshape(1, -1)
    if members.shape[0] == 0:
        raise ValueError("subsample must be non-empty")
    if members.shape[1] != query.shape[0]:
        raise ValueError(
            f"dimension mismatch: query has {query.shape[0]} features, "
            f"subsample has {members.shape[1]}"
        )
    keep = np.ones(members.shape[0], dtype=bool)
    if query_index is not None and subsample_indices is not None:
        keep = np.asarray(subsample_indices) != query_index
        if not keep.any():
            return 0.0
    diff = members[keep] - query
    return float(np.min(np.einsum("ij,ij->i", diff, diff)))


def _squared_dists(values, norms, subsample_idx) -> np.ndarray:
    """(N, s) squared distances from every object to the subsample rows."""
    block = values[subsample_idx]
    gram = values @ block.T
    if sp.issparse(gram):
        gram = gram.toarray()
    gram = np.asarray(gram)
    d2 = norms[:, None] + norms[subsample_idx][None, :] - 2.0 * gram
    np.maximum(d2, 0.0, out=d2)
    return d2


def _member_dists_brute(values, norms, subsample_idx) -> np.ndarray:
    d2 = _squared_dists(values, norms, subsample_idx)
    d2[subsample_idx, np.arange(subsample_idx.size)] = np.inf
    out = d2.min(axis=1)
    out[~np.isfinite(out)] = 0.0
    return out


def _member_dists_kd(values, subsample_idx) -> np.ndarray:
    n = values.shape[0]
    points = values[subsample_idx]
    tree = cKDTree(points)
    k = min(2, subsample_idx.size)
    dist, idx = tree.query(values, k=k)
    if k == 1:
        dist = dist[:, None]
        idx = idx[:, None]
    # Position of each object inside the subsample (-1 when absent), used to
    # skip the self-match returned by the tree.
    pos = np.full(n, -1, dtype=np.int64)
    pos[subsample_idx] = np.arange(subsample_idx.size)
    nearest = dist[:, 0].copy()
    self_first = idx[:, 0] == pos
    if k > 1:
        nearest[self_first] = dist[self_first, 1]
    else:
        nearest[self_first] = 0.0
    return nearest * nearest


def draw_subsamples(n_objects: int, config: SpConfig) -> list[np.ndarray]:
    """Draw the ensemble's subsample index lists from member-indexed streams.

    Each member gets its own child stream of the config seed, so results do
    not depend on evaluation order.
    """
    config.validate()
    if config.subsample_size >= n_objects:
        raise ValueError(
            f"subsample_size must be < N, got {config.subsample_size} >= {n_objects}"
        )
    root = np.random.SeedSequence(config.rng_seed)
    return [
        np.random.default_rng(child).choice(
            n_objects, size=config.subsample_size, replace=False
        )
        for child in root.spawn(config.ensemble_size)
    ]


def member_nn_dists(values, subsamples: Sequence[np.ndarray], backend: str = "brute_force") -> np.ndarray:
    """(N, m) nearest-subsample-member squared distances, one column per member.

    ``kd_tree`` is honored only for dense inputs of dimension <= KD_MAX_DIM.
    """
    n, d = values.shape
    use_kd = backend == "kd_tree" and d <= KD_MAX_DIM and not sp.issparse(values)
    out = np.empty((n, len(subsamples)), dtype=np.float64)
    if use_kd:
        values = np.ascontiguousarray(values)
        for j, idx in enumerate(subsamples):
            out[:, j] = _member_dists_kd(values, np.asarray(idx, dtype=np.int64))
        return out
    if sp.issparse(values):
        norms = np.asarray(values.multiply(values).sum(axis=1)).ravel()
    else:
        norms = np.einsum("ij,ij->i", values, values)
    for j, idx in enumerate(subsamples):
        out[:, j] = _member_dists_brute(values, norms, np.asarray(idx, dtype=np.int64))
    return out


def sp_score_with_subsamples(
    dataset, subsamples: Sequence[np.ndarray], backend: str = "brute_force"
) -> OutlierScores:
    """Score against explicit subsample index lists (no randomness).

    Accepts a Dataset or a raw matrix. This is the permutation-equivariant
    core: relabeling objects and mapping the subsample indices the same way
    permutes the scores identically.
    """
    values = dataset.values if isinstance(dataset, Dataset) else dataset
    for idx in subsamples:
        if len(idx) == 0:
            raise ValueError("subsample index lists must be non-empty")
        if np.unique(idx).size != len(idx):
            raise ValueError("subsample index lists must not contain duplicates")
    dists = member_nn_dists(values, subsamples, backend=backend)
    return OutlierScores.from_scores(dists.mean(axis=1))


def sp_score(dataset: Dataset, config: SpConfig) -> OutlierScores:
    """Ensemble-averaged nearest-neighbor-distance outlier scores.

    Draws ``ensemble_size`` subsamples of ``subsample_size`` objects
    (without replacement within a member, independently across members) and
    averages each object's nearest-member squared distance over the
    ensemble. Deterministic given ``config.rng_seed``.
    """
    subsamples = draw_subsamples(dataset.n_objects, config)
    return sp_score_with_subsamples(dataset, subsamples, backend=config.backend)


def sp_score_embedded(
    dataset: Dataset, model: RepresentationModel, config: SpConfig
) -> OutlierScores:
    """Score in the model's representation space.

    Equal to ``sp_score`` applied to the transformed dataset; with the
    ``kd_tree`` backend each subsample is indexed once and all queries run
    against the index.
    """
    if model.n_features != dataset.n_features:
        raise ValueError(
            f"model expects {model.n_features} features, dataset has {dataset.n_features}"
        )
    embedded = dataset.values @ model.weights
    embedded = np.asarray(embedded)
    np.maximum(embedded, 0.0, out=embedded)
    subsamples = draw_subsamples(dataset.n_objects, config)
    return sp_score_with_subsamples(embedded, subsamples, backend=config.backend)
