"""Learned representation vs sparse random projection at the same dimension.

Sparse random projection (entries +-sqrt(s/m) with probability 1/(2s) each,
zero otherwise) preserves pairwise distances in expectation and is a strong
cheap baseline for dimensionality reduction. But it is detector-agnostic:
it compresses signal and noise features alike. The learned representation
is trained against the detector's own objective and keeps what the
detector needs. Both reduce to 20 dimensions here.
"""

from repen import (
    HyperParams,
    SpConfig,
    auc,
    run_pipeline,
    sp_score,
    srp_project,
    synth_gaussian_with_outliers,
)

data = synth_gaussian_with_outliers(
    n_inliers=500, n_outliers=10, d_relevant=10, d_noise=1990,
    separation=6.0, seed=8,
)
m = 20

projected = srp_project(data, m, seed=8)
srp_scores = sp_score(projected, SpConfig(rng_seed=21))
srp_auc = auc(srp_scores.scores, data.labels)

result = run_pipeline(data, HyperParams(rep_dim=m, n_epochs=10,
                                        samples_per_epoch=2560, rng_seed=8))

print(f"original {data.n_features}-D space AUC: {result.auc_original:.4f}")
print(f"random projection to {m}-D:  {srp_auc:.4f}")
print(f"learned {m}-D representation: {result.auc_embedded:.4f}")
