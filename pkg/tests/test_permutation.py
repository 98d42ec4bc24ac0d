import numpy as np
import pytest

from facihub.errors import AnalysisError
from facihub.stats import permutation_sensitivity


def synthetic_strata(rng, n_learners=10, n_weeks=3, effect=0.0, scale=1.0):
    """Two obs per condition per (learner, week) stratum."""
    data = []
    for li in range(n_learners):
        learner = f"L{li:03d}"
        for week in range(202550, 202550 + n_weeks):
            for _ in range(2):
                data.append((learner, week, "with_pca",
                             float(rng.normal(effect, scale))))
                data.append((learner, week, "without_pca",
                             float(rng.normal(0.0, scale))))
    return data


def test_identical_values_give_zero_delta_and_p_one():
    data = []
    for li in range(5):
        for week in (202550, 202551):
            data.append((f"L{li}", week, "with_pca", 1.0))
            data.append((f"L{li}", week, "without_pca", 1.0))
    result = permutation_sensitivity(data, n_permutations=200, seed=1)
    assert result.observed_delta == 0.0
    assert result.empirical_p_two_tailed == 1.0
    assert result.percentile == pytest.approx(0.5)


def test_seeded_determinism_byte_identical():
    rng = np.random.default_rng(7)
    data = synthetic_strata(rng)
    a = permutation_sensitivity(data, n_permutations=300, seed=99, indicator="SP_OC")
    b = permutation_sensitivity(data, n_permutations=300, seed=99, indicator="SP_OC")
    assert repr(a) == repr(b)
    assert a == b


def test_different_seed_changes_null():
    rng = np.random.default_rng(8)
    data = synthetic_strata(rng)
    a = permutation_sensitivity(data, n_permutations=300, seed=1)
    b = permutation_sensitivity(data, n_permutations=300, seed=2)
    assert a.null_interval_95 != b.null_interval_95


def test_planted_effect_detected():
    rng = np.random.default_rng(9)
    data = synthetic_strata(rng, n_learners=17, n_weeks=3, effect=10.0, scale=1.0)
    result = permutation_sensitivity(data, n_permutations=2000, seed=5)
    assert result.empirical_p_two_tailed <= 0.01
    assert result.percentile == 1.0
    lo, hi = result.null_interval_95
    assert lo < 0 < hi < result.observed_delta


def test_ineligible_strata_excluded_and_counted():
    data = [
        ("L1", 202550, "with_pca", 1.0),
        ("L1", 202550, "without_pca", 0.5),
        ("L2", 202550, "with_pca", 2.0),   # single-condition stratum: excluded
        ("L3", 202551, "without_pca", 1.0),  # single obs: excluded
    ]
    result = permutation_sensitivity(data, n_permutations=50, seed=3)
    assert result.n_strata_used == 1
    assert result.n_strata_excluded == 2


def test_no_eligible_stratum_is_analysis_error():
    with pytest.raises(AnalysisError):
        permutation_sensitivity([("L1", 202550, "with_pca", 1.0)],
                                n_permutations=10, seed=0)


def test_unknown_condition_rejected():
    with pytest.raises(ValueError):
        permutation_sensitivity([("L1", 1, "treated", 1.0)], 10, 0)


def test_observed_delta_is_learner_level_mean_difference():
    # learner A: with mean 2.0, without mean 1.0; learner B: with 0.0, without 1.0
    data = [
        ("A", 202550, "with_pca", 2.0), ("A", 202550, "without_pca", 1.0),
        ("B", 202550, "with_pca", 0.0), ("B", 202550, "without_pca", 1.0),
    ]
    result = permutation_sensitivity(data, n_permutations=20, seed=0)
    assert result.observed_delta == pytest.approx((2.0 + 0.0) / 2 - (1.0 + 1.0) / 2)


def test_null_super_uniformity_on_exchangeable_data():
    hits = 0
    reps = 60
    for rep in range(reps):
        rng = np.random.default_rng(1000 + rep)
        data = synthetic_strata(rng, n_learners=12, n_weeks=2)
        result = permutation_sensitivity(data, n_permutations=400, seed=rep)
        if result.empirical_p_two_tailed <= 0.05:
            hits += 1
    assert hits / reps <= 0.10
