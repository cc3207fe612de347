"""Score-weighted triplet sampling for representation training.

Queries are drawn from the inlier candidates with probability inversely
proportional to outlier score (representative inliers are preferred),
positives uniformly from the inlier candidates (diversity), and negatives
from the outlier candidates proportionally to score (likely outliers are
preferred). When labeled outliers are available, part of each batch draws
its negatives uniformly from the labeled pool instead, and labeled indices
are dropped from the inlier side so they never act as pseudo-inliers.

All draws are with replacement across triplets and come from an explicit
generator argument, so batch construction is deterministic per stream.
"""

from __future__ import annotations

import warnings
from typing import Optional

import numpy as np

from .data import CandidateSets, OutlierScores, Triplet


def query_sampling_weights(scores: OutlierScores, inliers) -> np.ndarray:
    """Selection probabilities over the inlier candidates, low score favored.

    Weight of inlier i is (Z - r_i) / sum_t (Z - r_t) with Z the sum of
    inlier scores. Degenerate pools (a single inlier, or all-zero scores)
    fall back to uniform.
    """
    inliers = np.asarray(inliers, dtype=np.int64)
    if inliers.size == 0:
        raise ValueError("inlier candidate set must be non-empty")
    r = scores.scores[inliers]
    z = r.sum()
    raw = z - r
    total = raw.sum()
    if total <= 0.0:
        return np.full(inliers.size, 1.0 / inliers.size)
    return raw / total


def negative_sampling_weights(scores: OutlierScores, outliers) -> np.ndarray:
    """Selection probabilities over the outlier candidates, high score favored.

    Weight of candidate j is r_j / sum_t r_t. If every candidate scores
    zero, falls back to uniform with a warning.
    """
    outliers = np.asarray(outliers, dtype=np.int64)
    if outliers.size == 0:
        raise ValueError("outlier candidate set must be non-empty")
    r = scores.scores[outliers]
    total = r.sum()
    if total <= 0.0:
        warnings.warn(
            "all outlier-candidate scores are zero; using uniform negative weights"
        )
        return np.full(outliers.size, 1.0 / outliers.size)
    return r / total


def sample_batch_arrays(
    sets: CandidateSets,
    scores: OutlierScores,
    n: int,
    b: int,
    rng: np.random.Generator,
    labeled=None,
    labeled_fraction: float = 0.5,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Draw one batch as index arrays: queries (b, n), positives and negatives (b,).

    With a non-empty ``labeled`` pool, the last ``floor(b * labeled_fraction)``
    negatives come uniformly from the pool and the rest from the outlier
    candidates by score weighting; labeled indices are removed from the
    inlier side first.
    """
    if n < 1:
        raise ValueError(f"query size >= 1 required, got {n}")
    if b < 1:
        raise ValueError(f"batch size >= 1 required, got {b}")
    inliers = sets.inlier_idx
    labeled_arr = None
    if labeled is not None:
        labeled_arr = np.asarray(labeled, dtype=np.int64)
        if labeled_arr.size == 0:
            labeled_arr = None
    if labeled_arr is not None:
        inliers = np.setdiff1d(inliers, labeled_arr)
    if inliers.size == 0:
        raise ValueError("no inlier candidates left to sample from")
    if sets.outlier_idx.size == 0:
        raise ValueError("outlier candidate set must be non-empty")

    wq = query_sampling_weights(scores, inliers)
    queries = rng.choice(inliers, size=(b, n), replace=True, p=wq)
    positives = rng.choice(inliers, size=b, replace=True)

    n_labeled = int(b * labeled_fraction) if labeled_arr is not None else 0
    n_candidates = b - n_labeled
    parts = []
    if n_candidates:
        wn = negative_sampling_weights(scores, sets.outlier_idx)
        parts.append(rng.choice(sets.outlier_idx, size=n_candidates, replace=True, p=wn))
    if n_labeled:
        parts.append(rng.choice(labeled_arr, size=n_labeled, replace=True))
    negatives = np.concatenate(parts)
    return queries, positives, negatives


def sample_batch(
    sets: CandidateSets,
    scores: OutlierScores,
    n: int,
    b: int,
    rng: np.random.Generator,
    labeled=None,
    labeled_fraction: float = 0.5,
) -> list[Triplet]:
    """Draw one batch of ``b`` triplets (see ``sample_batch_arrays``)."""
    queries, positives, negatives = sample_batch_arrays(
        sets, scores, n, b, rng, labeled=labeled, labeled_fraction=labeled_fraction
    )
    return [
        Triplet(tuple(int(q) for q in queries[s]), int(positives[s]), int(negatives[s]))
        for s in range(b)
    ]
