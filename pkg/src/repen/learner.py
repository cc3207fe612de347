"""Representation learning with a nearest-query hinge ranking loss.

The representation is a single fully-connected layer with ReLU activation:
feature k of the embedding is max(0, w_k . x). Training pushes each
negative example's squared distance to its nearest embedded query above the
positive example's by a margin:

    J = max(0, margin + d(f(x+), Q) - d(f(x-), Q))

where d(., Q) is the minimum squared Euclidean distance to the embedded
query set. Gradients are exact subgradients: the hinge contributes nothing
when J = 0, distance terms flow only through the selected nearest query
member for each side (argmin ties break toward the lowest query position),
and the ReLU mask zeroes coordinates whose pre-activation is <= 0. A query
member with the same dataset index as the positive (or negative) is skipped
in the min; a side with every member skipped makes the whole triplet
contribute zero.

Batches average per-triplet gradients over all b triplets (zero-loss
triplets included) before a single ADADELTA step.

Model persistence format (stable): little-endian binary, magic ``RPNM``,
uint32 version (currently 1), uint64 D, uint64 M, then D*M float64 weights
in row-major order.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .data import (
    CandidateSets,
    Dataset,
    HyperParams,
    OutlierScores,
    RepresentationModel,
    Triplet,
)
from .sampling import sample_batch_arrays

_MODEL_MAGIC = b"RPNM"
_MODEL_VERSION = 1


def embed(model: RepresentationModel, x) -> np.ndarray:
    """Map one input vector (dense or sparse row) into the representation space."""
    if sp.issparse(x):
        if x.shape[1] != model.n_features:
            raise ValueError(
                f"dimension mismatch: expected {model.n_features}, got {x.shape[1]}"
            )
        pre = np.asarray(x @ model.weights).ravel()
    else:
        x = np.asarray(x, dtype=np.float64)
        if x.shape != (model.n_features,):
            raise ValueError(
                f"dimension mismatch: expected ({model.n_features},), got {x.shape}"
            )
        pre = x @ model.weights
    return np.maximum(pre, 0.0)


def embed_matrix(weights: np.ndarray, values) -> np.ndarray:
    """ReLU(values @ weights) for a dense or CSR matrix of inputs."""
    pre = values @ weights
    pre = np.asarray(pre)
    return np.maximum(pre, 0.0)


def transform(model: RepresentationModel, dataset: Dataset) -> Dataset:
    """Embed every object, producing a dense (N, M) dataset.

    Labels and known-outlier marks carry through unchanged.
    """
    if model.n_features != dataset.n_features:
        raise ValueError(
            f"model expects {model.n_features} features, dataset has {dataset.n_features}"
        )
    return Dataset(
        embed_matrix(model.weights, dataset.values),
        dataset.labels,
        dataset.known_outliers,
    )


def _batch_loss_grad(
    values,
    weights: np.ndarray,
    queries: np.ndarray,
    positives: np.ndarray,
    negatives: np.ndarray,
    margin: float,
    want_grad: bool = True,
):
    """Losses (b,) and the batch-mean weight gradient for index-coded triplets.

    ``queries`` has shape (b, n); positives/negatives have shape (b,).
    The gradient is None when ``want_grad`` is false.
    """
    b, n = queries.shape
    rows = np.unique(np.concatenate([queries.ravel(), positives, negatives]))
    block = values[rows]
    pre = np.asarray(block @ weights)
    emb = np.maximum(pre, 0.0)
    active_mask = pre > 0.0

    loc_q = np.searchsorted(rows, queries)
    loc_p = np.searchsorted(rows, positives)
    loc_n = np.searchsorted(rows, negatives)

    eq = emb[loc_q]                      # (b, n, M)
    epos = emb[loc_p][:, None, :]        # (b, 1, M)
    eneg = emb[loc_n][:, None, :]

    d_pos_all = ((epos - eq) ** 2).sum(axis=2)   # (b, n)
    d_neg_all = ((eneg - eq) ** 2).sum(axis=2)

    excl_pos = queries == positives[:, None]
    excl_neg = queries == negatives[:, None]
    d_pos_all = np.where(excl_pos, np.inf, d_pos_all)
    d_neg_all = np.where(excl_neg, np.inf, d_neg_all)

    sel_pos = np.argmin(d_pos_all, axis=1)
    sel_neg = np.argmin(d_neg_all, axis=1)
    valid = ~excl_pos.all(axis=1) & ~excl_neg.all(axis=1)

    arange = np.arange(b)
    d_pos = np.where(valid, d_pos_all[arange, sel_pos], 0.0)
    d_neg = np.where(valid, d_neg_all[arange, sel_neg], 0.0)
    losses = np.where(valid, np.maximum(0.0, margin + d_pos - d_neg), 0.0)

    if not want_grad:
        return losses, None

    active = losses > 0.0
    qp = loc_q[arange, sel_pos]
    qn = loc_q[arange, sel_neg]
    u = (emb[loc_p] - emb[qp]) * (2.0 * active)[:, None]
    v = (emb[loc_n] - emb[qn]) * (2.0 * active)[:, None]

    coeff = np.zeros((rows.size, weights.shape[1]))
    np.add.at(coeff, loc_p, u * active_mask[loc_p])
    np.add.at(coeff, qp, -u * active_mask[qp])
    np.add.at(coeff, loc_n, -v * active_mask[loc_n])
    np.add.at(coeff, qn, v * active_mask[qn])

    grad = block.T @ coeff
    grad = np.asarray(grad) / b
    return losses, grad


def _triplet_arrays(triplet: Triplet):
    q = np.asarray([triplet.query], dtype=np.int64)
    p = np.asarray([triplet.positive], dtype=np.int64)
    g = np.asarray([triplet.negative], dtype=np.int64)
    return q, p, g


def _values_of(data) -> object:
    return data.values if isinstance(data, Dataset) else data


def triplet_loss(model: RepresentationModel, data, triplet: Triplet, margin: float) -> float:
    """Hinge ranking loss of one triplet against the dataset's rows."""
    if margin <= 0:
        raise ValueError(f"margin > 0 required, got {margin}")
    q, p, g = _triplet_arrays(triplet)
    losses, _ = _batch_loss_grad(
        _values_of(data), model.weights, q, p, g, margin, want_grad=False
    )
    return float(losses[0])


def loss_gradient(
    model: RepresentationModel, data, triplet: Triplet, margin: float
) -> np.ndarray:
    """Exact (D, M) subgradient of ``triplet_loss`` with respect to the weights."""
    if margin <= 0:
        raise ValueError(f"margin > 0 required, got {margin}")
    q, p, g = _triplet_arrays(triplet)
    _, grad = _batch_loss_grad(_values_of(data), model.weights, q, p, g, margin)
    return grad


@dataclass
class OptimizerState:
    """ADADELTA accumulators: decayed squared gradients and squared updates."""

    accum_grad_sq: np.ndarray
    accum_update_sq: np.ndarray
    decay: float = 0.95
    eps: float = 1e-4

    @classmethod
    def zeros(cls, d: int, m: int, decay: float = 0.95, eps: float = 1e-4) -> "OptimizerState":
        return cls(np.zeros((d, m)), np.zeros((d, m)), decay, eps)


def adadelta_step(
    state: OptimizerState, weights: np.ndarray, gradient: np.ndarray
) -> tuple[np.ndarray, OptimizerState]:
    """One ADADELTA update; returns new weights and new state (inputs untouched).

    accum_g <- rho * accum_g + (1 - rho) * g^2
    step    <- -sqrt(accum_u + eps) / sqrt(accum_g + eps) * g
    accum_u <- rho * accum_u + (1 - rho) * step^2
    """
    if gradient.shape != weights.shape or state.accum_grad_sq.shape != weights.shape:
        raise ValueError("weights, gradient, and optimizer state shapes must agree")
    rho, eps = state.decay, state.eps
    accum_g = rho * state.accum_grad_sq + (1.0 - rho) * gradient * gradient
    step = -np.sqrt(state.accum_update_sq + eps) / np.sqrt(accum_g + eps) * gradient
    accum_u = rho * state.accum_update_sq + (1.0 - rho) * step * step
    return weights + step, OptimizerState(accum_g, accum_u, rho, eps)


@dataclass
class TrainReport:
    """Loss trajectory plus triplet-ordering quality before and after training.

    The violation rate is the fraction of a held-out evaluation batch whose
    positive-side distance plus margin still exceeds the negative-side
    distance (i.e. triplets with positive loss).
    """

    epoch_mean_loss: list[float] = field(default_factory=list)
    final_mean_loss: float = 0.0
    violation_rate: float = 0.0
    initial_violation_rate: float = 0.0


def initial_weights(d: int, m: int, rng: np.random.Generator) -> np.ndarray:
    """Fan-scaled uniform init on (-sqrt(6/(D+M)), sqrt(6/(D+M)))."""
    limit = math.sqrt(6.0 / (d + m))
    return rng.uniform(-limit, limit, size=(d, m))


def train(
    dataset: Dataset,
    sets: CandidateSets,
    scores: OutlierScores,
    params: HyperParams,
    labeled=None,
) -> tuple[RepresentationModel, TrainReport]:
    """Learn representation weights from candidate sets and their scores.

    Runs ``n_epochs * ceil(samples_per_epoch / batch_size)`` batches; each
    batch samples triplets, averages their gradients, and applies one
    ADADELTA step. Separate child streams drive initialization, every batch,
    and the held-out evaluation batch, so runs are reproducible from
    ``params.rng_seed`` alone and independent of evaluation order.

    When ``labeled`` is omitted, the dataset's own ``known_outliers`` (if
    any) serve as the labeled pool.
    """
    params.validate()
    d = dataset.n_features
    m = params.rep_dim
    if m > d:
        raise ValueError(f"rep_dim must be <= n_features, got {m} > {d}")
    if labeled is None:
        labeled = dataset.known_outliers

    root = np.random.SeedSequence(params.rng_seed)
    init_ss, batch_ss, eval_ss = root.spawn(3)
    weights = initial_weights(d, m, np.random.default_rng(init_ss))
    state = OptimizerState.zeros(d, m, params.optimizer_decay, params.optimizer_eps)

    values = dataset.values
    n_batches = math.ceil(params.samples_per_epoch / params.batch_size)

    def _eval_losses(w: np.ndarray) -> np.ndarray:
        rng = np.random.default_rng(eval_ss)
        q, p, g = sample_batch_arrays(
            sets,
            scores,
            params.query_size,
            params.batch_size,
            rng,
            labeled=labeled,
            labeled_fraction=params.labeled_fraction,
        )
        losses, _ = _batch_loss_grad(values, w, q, p, g, params.margin, want_grad=False)
        return losses

    init_losses = _eval_losses(weights)
    report = TrainReport(initial_violation_rate=float((init_losses > 0).mean()))

    streams = batch_ss.spawn(params.n_epochs * n_batches) if params.n_epochs else []
    k = 0
    for _ in range(params.n_epochs):
        epoch_losses = np.empty(n_batches)
        for j in range(n_batches):
            rng = np.random.default_rng(streams[k])
            k += 1
            q, p, g = sample_batch_arrays(
                sets,
                scores,
                params.query_size,
                params.batch_size,
                rng,
                labeled=labeled,
                labeled_fraction=params.labeled_fraction,
            )
            losses, grad = _batch_loss_grad(values, weights, q, p, g, params.margin)
            epoch_losses[j] = losses.mean()
            weights, state = adadelta_step(state, weights, grad)
        report.epoch_mean_loss.append(float(epoch_losses.mean()))

    final_losses = _eval_losses(weights)
    report.violation_rate = float((final_losses > 0).mean())
    report.final_mean_loss = (
        report.epoch_mean_loss[-1] if report.epoch_mean_loss else float(final_losses.mean())
    )
    return RepresentationModel(weights), report


def save_model(model: RepresentationModel, path) -> None:
    """Write a model in the stable binary layout described in the module docs."""
    header = _MODEL_MAGIC + struct.pack(
        "<IQQ", _MODEL_VERSION, model.n_features, model.rep_dim
    )
    payload = np.ascontiguousarray(model.weights, dtype="<f8").tobytes()
    with open(path, "wb") as handle:
        handle.write(header)
        handle.write(payload)


def load_model(path) -> RepresentationModel:
    """Read a model written by ``save_model``."""
    with open(path, "rb") as handle:
        blob = handle.read()
    if blob[:4] != _MODEL_MAGIC:
        raise ValueError("not a representation model file (bad magic)")
    version, d, m = struct.unpack("<IQQ", blob[4:24])
    if version != _MODEL_VERSION:
        raise ValueError(f"unsupported model version {version}")
    expected = 24 + d * m * 8
    if len(blob) != expected:
        raise ValueError(f"model file truncated: expected {expected} bytes, got {len(blob)}")
    weights = np.frombuffer(blob[24:], dtype="<f8").reshape(d, m)
    return RepresentationModel(weights.copy())
