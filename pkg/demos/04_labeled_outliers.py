"""Using a handful of labeled outliers to sharpen the training triplets.

When the score-based candidate set is noisy (weak signal, heavy overlap),
half of each batch's negative examples can come from a small labeled
outlier pool instead. The labeled rows are excluded from the inlier side
and from evaluation; they act purely as supervision. On this hard
synthetic (separation 2.5), a pool of 40 labels buys a visible AUC gain.
"""

import numpy as np

from repen import Dataset, HyperParams, run_pipeline, synth_gaussian_with_outliers

data = synth_gaussian_with_outliers(
    n_inliers=400, n_outliers=60, d_relevant=10, d_noise=1990,
    separation=2.5, seed=5,
)
params = HyperParams(rep_dim=20, n_epochs=10, samples_per_epoch=2560, rng_seed=5)

# Unsupervised run: every row is unlabeled.
unsupervised = run_pipeline(data, params)

# Mark 40 of the ground-truth outliers as known; they join the negative
# pool during training and drop out of the reported AUC.
rng = np.random.default_rng(9)
known = rng.choice(np.flatnonzero(data.labels), size=40, replace=False)
with_labels = Dataset(data.values, data.labels, known_outliers=known)
supervised = run_pipeline(with_labels, params)

print(f"original-space AUC:          {unsupervised.auc_original:.4f}")
print(f"learned space, no labels:    {unsupervised.auc_embedded:.4f}")
print(f"learned space, 40 labels:    {supervised.auc_embedded:.4f}")
