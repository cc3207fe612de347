"""Turning scores into candidate sets with a guaranteed false-positive cap.

The one-sided Chebyshev (Cantelli) inequality says: whatever the score
distribution, at most 1 / (1 + alpha^2) of the objects can score at or
above mean + alpha * std. Thresholding there yields an outlier candidate
set whose size, as a fraction, never exceeds that bound. The default
alpha = 1.732 gives a 25% ceiling.
"""

import numpy as np

from repen import OutlierScores, candidate_sets, cantelli_bound, cantelli_partition

rng = np.random.default_rng(0)

print(f"bound at alpha = 1.732: {cantelli_bound(1.732):.3f}")
print()

families = {
    "uniform": rng.random(2000),
    "gaussian^2": rng.standard_normal(2000) ** 2,
    "lognormal": rng.lognormal(0, 1.2, 2000),
    "pareto (heavy tail)": rng.pareto(1.3, 2000),
}

for alpha in (0.5, 1.0, 1.732, 3.0):
    print(f"alpha = {alpha}: ceiling {cantelli_bound(alpha):.3f}")
    for name, values in families.items():
        scores = OutlierScores.from_scores(values)
        sets = cantelli_partition(scores, alpha)
        frac = sets.outlier_idx.size / len(scores)
        print(f"  {name:<22} candidate fraction {frac:.3f}")
    print()

# Degenerate input: constant scores select nothing, so the pipeline-facing
# helper falls back to the top scorers to keep the negative pool non-empty.
flat = OutlierScores.from_scores(np.full(40, 3.0))
print("constant scores, raw partition:",
      cantelli_partition(flat, 1.732).outlier_idx.size, "candidates")
print("constant scores, with fallback:",
      candidate_sets(flat, 1.732).outlier_idx.size, "candidates (top 5%)")
