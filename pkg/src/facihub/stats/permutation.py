"""Within-stratum permutation sensitivity analysis for condition effects.

Condition labels are shuffled independently inside each (learner, iso-week)
stratum, preserving per-stratum label counts, and the learner-level mean
difference is recomputed for each replicate. Replicate randomness derives
from (seed, replicate index), so results are identical regardless of
evaluation order or parallel scheduling.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..errors import AnalysisError

log = logging.getLogger(__name__)

WITH, WITHOUT = "with_pca", "without_pca"


@dataclass(frozen=True)
class PermutationResult:
    indicator: str
    observed_delta: float
    null_interval_95: tuple[float, float]
    percentile: float
    empirical_p_two_tailed: float
    n_permutations: int
    seed: int
    n_strata_used: int
    n_strata_excluded: int


def _prepare(data: Sequence[tuple[str, int, str, float]]):
    strata: dict[tuple[str, int], list[tuple[str, float]]] = {}
    for learner, week, condition, value in data:
        if condition not in (WITH, WITHOUT):
            raise ValueError(f"condition must be {WITH!r} or {WITHOUT!r}, got {condition!r}")
        strata.setdefault((str(learner), int(week)), []).append((condition, float(value)))

    eligible: list[tuple[tuple[str, int], list[tuple[str, float]]]] = []
    n_excluded = 0
    for key, obs in sorted(strata.items()):
        conds = {c for c, _ in obs}
        if len(obs) >= 2 and conds == {WITH, WITHOUT}:
            eligible.append((key, obs))
        else:
            n_excluded += 1
            log.info("permutation stratum %s excluded (%d obs, conditions %s)",
                     key, len(obs), sorted(conds))
    if not eligible:
        raise AnalysisError("no stratum has both conditions with >= 2 observations")

    # Per-learner per-condition counts are invariant under within-stratum
    # shuffles (every stratum belongs to a single learner), so the learner
    # mean denominators are constants and the delta is linear in the labels.
    learners = sorted({key[0] for key, _ in eligible})
    count_with = {l: 0 for l in learners}
    count_without = {l: 0 for l in learners}
    for (learner, _), obs in eligible:
        for cond, _ in obs:
            (count_with if cond == WITH else count_without)[learner] += 1

    n_learners = len(learners)
    coef: list[float] = []
    observed_flags: list[bool] = []
    const = 0.0
    slices: list[tuple[int, int, int]] = []
    for (learner, _), obs in eligible:
        start = len(coef)
        n_with = sum(1 for c, _ in obs if c == WITH)
        alpha = 1.0 / (count_with[learner] * n_learners)
        beta = 1.0 / (count_without[learner] * n_learners)
        for cond, value in obs:
            coef.append(value * (alpha + beta))
            const -= value * beta
            observed_flags.append(cond == WITH)
        slices.append((start, len(coef), n_with))
    return (np.asarray(coef), np.asarray(observed_flags, dtype=bool), const,
            slices, n_excluded)


def permutation_sensitivity(data: Sequence[tuple[str, int, str, float]],
                            n_permutations: int = 2000,
                            seed: int = 0,
                            indicator: str = "") -> PermutationResult:
    """Empirical null for the learner-level with-minus-without mean difference.

    `data` rows are (learner_id, iso_week, condition, value). Strata lacking
    both conditions or holding fewer than two observations are excluded and
    logged. Returns the null 95% interval, the observed delta's percentile
    (midrank convention), and the add-one two-tailed empirical p-value.
    """
    if n_permutations < 1:
        raise ValueError(f"n_permutations must be >= 1, got {n_permutations}")
    coef, observed_flags, const, slices, n_excluded = _prepare(data)
    n_obs = coef.size
    # Deltas are computed from a linear form; cancellation leaves O(eps)
    # residue when the true delta is 0, so snap within rounding scale.
    tol = 1e-12 * (abs(const) + float(np.abs(coef).sum()) + 1e-300)
    observed = const + float(coef[observed_flags].sum())
    if abs(observed) <= tol:
        observed = 0.0

    # Per-replicate generators derived from (seed, replicate index).
    keys = np.empty((n_permutations, n_obs))
    for i in range(n_permutations):
        keys[i] = np.random.default_rng((int(seed), i)).random(n_obs)

    null = np.full(n_permutations, const)
    rows = np.arange(n_permutations)[:, None]
    for start, stop, n_with in slices:
        block = keys[:, start:stop]
        # The n_with smallest keys in each replicate take the "with" label:
        # uniform over all within-stratum label arrangements.
        order = np.argsort(block, axis=1, kind="stable")
        ranks = np.empty_like(order)
        ranks[rows, order] = np.arange(stop - start)[None, :]
        null += (ranks < n_with) @ coef[start:stop]

    null[np.abs(null) <= tol] = 0.0
    lo, hi = np.percentile(null, [2.5, 97.5])
    below = float(np.count_nonzero(null < observed))
    ties = float(np.count_nonzero(null == observed))
    percentile = (below + 0.5 * ties) / n_permutations
    extreme = int(np.count_nonzero(np.abs(null) >= abs(observed)))
    empirical_p = (1 + extreme) / (n_permutations + 1)
    return PermutationResult(indicator=indicator,
                             observed_delta=observed,
                             null_interval_95=(float(lo), float(hi)),
                             percentile=float(percentile),
                             empirical_p_two_tailed=float(empirical_p),
                             n_permutations=n_permutations,
                             seed=int(seed),
                             n_strata_used=len(slices),
                             n_strata_excluded=n_excluded)
