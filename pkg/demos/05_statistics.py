"""Walkthrough: the inferential battery behind the evaluation reports.

Paired comparisons gate on Shapiro-Wilk normality into a paired t test or
a Wilcoxon signed-rank test (exact enumeration at small n); independent
group comparisons use Mann-Whitney U; families of nine indices get
Benjamini-Hochberg adjustment; and a within-learner-week permutation test
bounds sensitivity to the alternating assignment rule.
"""

import numpy as np

from facihub.presence import aggregate_indices
from facihub.stats import (GOAL1, bh_adjust, mann_whitney_u,
                           permutation_sensitivity, run_goal_analysis,
                           shapiro_wilk, wilcoxon_signed_rank)

rng = np.random.default_rng(0)

# -- primitive tests ---------------------------------------------------------

w, p = shapiro_wilk(rng.normal(size=40))
print(f"Shapiro-Wilk on normal draws: W={w:.4f} p={p:.3f}")

result = wilcoxon_signed_rank([1, 2, 3], "one_tailed_greater")
print(f"Wilcoxon [1,2,3] greater: W+={result.statistic} "
      f"p={result.p_value} ({result.method})")

result = mann_whitney_u([1, 2], [3, 4], "one_tailed_less")
print(f"Mann-Whitney [1,2] vs [3,4]: U={result.statistic} "
      f"p={result.p_value:.4f} r={result.effect_size.value:.3f}")

print("BH([0.01, 0.02, 0.04]) ->", bh_adjust([0.01, 0.02, 0.04]).adjusted)

# -- a nine-index paired report on synthetic learner means ------------------


def vec(oc=0.0, nc=0.0, **rest):
    return aggregate_indices({"OC1": oc, "NC1": nc})


means = {}
for i in range(60):
    learner = f"L{i:03d}"
    oc = float(rng.uniform(0.2, 0.6))
    means[(learner, "without_pca")] = vec(oc=oc)
    means[(learner, "with_pca")] = vec(oc=oc + 0.3 + float(rng.normal(0, 0.05)),
                                       nc=float(abs(rng.normal(0, 0.03))))
report = run_goal_analysis(GOAL1, means)
print("\npaired nine-index report (planted lift on Open Communication):")
print(report.to_tsv())

# -- permutation sensitivity -------------------------------------------------

data = []
for li in range(30):
    for week in (202549, 202550):
        for _ in range(2):
            data.append((f"L{li}", week, "with_pca", float(rng.normal(0.3, 1))))
            data.append((f"L{li}", week, "without_pca", float(rng.normal(0.0, 1))))
perm = permutation_sensitivity(data, n_permutations=2000, seed=7,
                               indicator="SP_OC")
lo, hi = perm.null_interval_95
print(f"permutation: observed={perm.observed_delta:.3f} "
      f"null95=[{lo:.3f}, {hi:.3f}] percentile={perm.percentile:.3f} "
      f"p={perm.empirical_p_two_tailed:.4f}")
