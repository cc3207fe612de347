"""repen: outlier-detector-aware representation learning.

Learns a low-dimensional ReLU representation of (ultra)high-dimensional
data tailored to random nearest-neighbor-distance outlier scoring, so that
detection in the learned space is both more accurate and fast enough for
k-d-tree indexing.
"""

from .data import (
    CandidateSets,
    Dataset,
    HyperParams,
    OutlierScores,
    RepresentationModel,
    Triplet,
    validate,
)
from .evaluation import auc
from .ingest import (
    downsample_to_rate,
    load_csv,
    load_libsvm,
    minmax_scale,
    synth_gaussian_with_outliers,
    write_csv,
    write_libsvm,
)
from .learner import (
    OptimizerState,
    TrainReport,
    adadelta_step,
    embed,
    load_model,
    loss_gradient,
    save_model,
    train,
    transform,
    triplet_loss,
)
from .pipeline import PipelineResult, run_pipeline
from .sampling import negative_sampling_weights, query_sampling_weights, sample_batch
from .sp import SpConfig, nn_dist, sp_score, sp_score_embedded, sp_score_with_subsamples
from .srp import srp_matrix, srp_project
from .thresholding import candidate_sets, cantelli_bound, cantelli_partition

__version__ = "0.1.0"

__all__ = [
    "CandidateSets",
    "Dataset",
    "HyperParams",
    "OutlierScores",
    "RepresentationModel",
    "Triplet",
    "validate",
    "auc",
    "downsample_to_rate",
    "load_csv",
    "load_libsvm",
    "minmax_scale",
    "synth_gaussian_with_outliers",
    "write_csv",
    "write_libsvm",
    "OptimizerState",
    "TrainReport",
    "adadelta_step",
    "embed",
    "load_model",
    "loss_gradient",
    "save_model",
    "train",
    "transform",
    "triplet_loss",
    "PipelineResult",
    "run_pipeline",
    "negative_sampling_weights",
    "query_sampling_weights",
    "sample_batch",
    "SpConfig",
    "nn_dist",
    "sp_score",
    "sp_score_embedded",
    "sp_score_with_subsamples",
    "srp_matrix",
    "srp_project",
    "candidate_sets",
    "cantelli_bound",
    "cantelli_partition",
    "__version__",
]
