"""Alpha and beta diversity: closed forms, bounds, and a frozen profile."""

import math

import numpy as np
import pytest

from adam.diversity import (
    ALPHA_METRICS,
    BETA_METRICS,
    alpha_metrics,
    berger_parker_index,
    beta_metrics,
    bray_curtis,
    canberra_distance,
    diversity_profile,
    gini_simpson_index,
    jaccard_distance,
    shannon_index,
)
from adam.errors import AlignmentError, DegenerateCommunityError

# 64-taxon community tuned so the report-format values are exactly
# "3.50" (Shannon) and "0.93" (Gini-Simpson): one dominant taxon,
# ten mid-abundance taxa, and a uniform tail.
BALANCED_PROFILE = (22.97697,) + (3.78242,) * 10 + (0.7396,) * 53


def test_uniform_community_closed_forms():
    for k in (1, 2, 3, 5, 17, 64, 1000):
        x = np.full(k, 7.3)
        assert abs(shannon_index(x) - math.log(k)) < 1e-12
        assert abs(gini_simpson_index(x) - (1.0 - 1.0 / k)) < 1e-12
        assert abs(berger_parker_index(x) - 1.0 / k) < 1e-12


def test_single_taxon_community():
    x = [0.0, 9.5, 0.0, 0.0]
    assert shannon_index(x) == 0.0
    assert gini_simpson_index(x) == 0.0
    assert berger_parker_index(x) == 1.0


def test_alpha_scale_invariance():
    rng = np.random.default_rng(0)
    for _ in range(50):
        x = rng.random(32) + 1e-9
        for fn in (shannon_index, gini_simpson_index, berger_parker_index):
            assert abs(fn(x) - fn(x * 1234.5)) < 1e-12


def test_frozen_profile_matches_report_formats():
    h = shannon_index(BALANCED_PROFILE)
    gs = gini_simpson_index(BALANCED_PROFILE)
    assert f"{h:.2f}" == "3.50"
    assert f"{gs:.2f}" == "0.93"
    # independent direct-summation oracle
    total = math.fsum(BALANCED_PROFILE)
    p = [v / total for v in BALANCED_PROFILE]
    h_oracle = -math.fsum(pi * math.log(pi) for pi in p)
    gs_oracle = 1.0 - math.fsum(pi * pi for pi in p)
    assert abs(h - h_oracle) < 1e-12
    assert abs(gs - gs_oracle) < 1e-12
    assert abs(berger_parker_index(BALANCED_PROFILE) - max(p)) < 1e-15


def test_beta_symmetry_and_bounds():
    rng = np.random.default_rng(1)
    for _ in range(300):
        d = int(rng.integers(2, 40))
        x = rng.random(d) * rng.integers(1, 100)
        y = rng.random(d) * rng.integers(1, 100)
        x[rng.random(d) < 0.3] = 0.0
        y[rng.random(d) < 0.3] = 0.0
        if x.sum() == 0 or y.sum() == 0:
            continue
        for fn in (bray_curtis, jaccard_distance, canberra_distance):
            assert abs(fn(x, y) - fn(y, x)) < 1e-12
        assert 0.0 <= bray_curtis(x, y) <= 1.0
        assert 0.0 <= jaccard_distance(x, y) <= 1.0
        support = int(np.sum((x + y) > 0))
        assert 0.0 <= canberra_distance(x, y) <= support + 1e-12
        for fn in (bray_curtis, jaccard_distance, canberra_distance):
            assert fn(x, x) == 0.0


def test_beta_extremes():
    x = np.array([1.0, 2.0, 0.0, 0.0])
    y = np.array([0.0, 0.0, 3.0, 1.0])
    assert bray_curtis(x, y) == 1.0
    assert jaccard_distance(x, y) == 1.0
    assert canberra_distance(x, y) == 4.0
    z = np.array([2.0, 4.0, 0.0, 0.0])
    assert jaccard_distance(x, z) == 0.0  # same support


def test_bray_curtis_hand_value():
    # |1-2| + |3-1| = 3 over 1+2+3+1 = 7
    assert abs(bray_curtis([1, 3], [2, 1]) - 3.0 / 7.0) < 1e-15


def test_metric_dicts():
    x = [1.0, 2.0, 3.0]
    a = alpha_metrics(x)
    assert tuple(a) == ALPHA_METRICS
    b = beta_metrics(x, [3.0, 2.0, 1.0])
    assert tuple(b) == BETA_METRICS


def test_input_validation():
    with pytest.raises(DegenerateCommunityError):
        shannon_index([])
    with pytest.raises(DegenerateCommunityError):
        gini_simpson_index([0.0, 0.0])
    with pytest.raises(ValueError):
        shannon_index([1.0, -0.5])
    with pytest.raises(ValueError):
        berger_parker_index([1.0, float("inf")])
    with pytest.raises(AlignmentError):
        bray_curtis([1.0, 2.0], [1.0, 2.0, 3.0])
    with pytest.raises(DegenerateCommunityError):
        jaccard_distance([1.0, 2.0], [0.0, 0.0])
    with pytest.raises(ValueError):
        canberra_distance([[1.0]], [[1.0]])


def test_diversity_profile_means():
    rng = np.random.default_rng(2)
    sample = rng.random(16)
    ref = rng.random((5, 16))
    prof = diversity_profile(sample, ref)
    assert prof.shannon == shannon_index(sample)
    assert prof.gini_simpson == gini_simpson_index(sample)
    assert prof.berger_parker == berger_parker_index(sample)
    for metric in BETA_METRICS:
        manual = np.mean([beta_metrics(sample, row)[metric] for row in ref])
        assert abs(prof.beta_to_reference[metric] - manual) < 1e-12
    with pytest.raises(AlignmentError):
        diversity_profile(sample, rng.random((3, 8)))
    with pytest.raises(DegenerateCommunityError):
        diversity_profile(sample, np.empty((0, 16)))
