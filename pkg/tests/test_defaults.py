import numpy as np
import pytest

from robustxva.curves import HazardCurve, flat_hazard_curve
from robustxva.defaults import (
    default_index_probabilities,
    sample_default_times,
    sample_joint_default_times,
)
from robustxva.grids import DateGrid


def test_zero_hazard_never_defaults():
    grid = DateGrid.regular(5.0, 4)
    curve = HazardCurve(np.array([5.0]), np.array([0.0]))
    idx = sample_default_times(curve, grid, 1000, seed=0)
    assert np.all(idx == 0)


def test_huge_hazard_defaults_immediately():
    grid = DateGrid.regular(5.0, 4)
    curve = HazardCurve(np.array([5.0]), np.array([500.0]))
    idx = sample_default_times(curve, grid, 1000, seed=0)
    assert np.all(idx == 1)


def test_probabilities_sum_to_one():
    grid = DateGrid.regular(10.0, 4)
    curve = flat_hazard_curve(0.02, 0.4, horizon=10.0)
    probs = default_index_probabilities(curve, grid)
    assert probs.sum() == pytest.approx(1.0, abs=1e-12)
    assert np.all(probs >= 0)


def test_empirical_frequencies_match_survival_curve():
    grid = DateGrid.regular(10.0, 2)
    curve = flat_hazard_curve(0.06, 0.4, horizon=10.0)
    n = 50_000
    idx = sample_default_times(curve, grid, n, seed=2024)
    surv = curve.survival(grid.times)
    for k in range(1, grid.n + 1):
        freq = np.mean(idx.__le__(k) & (idx > 0))
        target = 1.0 - surv[k]
        se = np.sqrt(target * (1 - target) / n)
        assert abs(freq - target) <= 3 * se + 1e-12, f"date index {k}"


def test_determinism():
    grid = DateGrid.regular(5.0, 4)
    curve = flat_hazard_curve(0.03, 0.4)
    a = sample_default_times(curve, grid, 256, seed=7)
    b = sample_default_times(curve, grid, 256, seed=7)
    assert np.array_equal(a, b)


def test_joint_sampling_clears_all_ties():
    grid = DateGrid.regular(5.0, 1)  # coarse grid + fat hazards provoke ties
    c1 = flat_hazard_curve(0.30, 0.4)
    c2 = flat_hazard_curve(0.25, 0.4)
    idx_c, idx_f = sample_joint_default_times(c1, c2, grid, 50_000, seed=99)
    assert not np.any((idx_c != 0) & (idx_c == idx_f))


def test_joint_sampling_keeps_marginals_at_desk_parameters():
    # tie probability is O(p_c * p_f) per bucket, so the conditional redraw
    # distorts the firm marginal well below Monte Carlo noise here
    grid = DateGrid.regular(5.0, 1)
    c1 = flat_hazard_curve(0.015, 0.4)
    c2 = flat_hazard_curve(0.012, 0.4)
    n = 50_000
    idx_c, idx_f = sample_joint_default_times(c1, c2, grid, n, seed=99)
    assert not np.any((idx_c != 0) & (idx_c == idx_f))
    for curve, idx in ((c1, idx_c), (c2, idx_f)):
        surv = curve.survival(grid.times)
        for k in range(1, grid.n + 1):
            freq = np.mean((idx <= k) & (idx > 0))
            target = 1.0 - surv[k]
            se = np.sqrt(target * (1 - target) / n)
            assert abs(freq - target) <= 3.5 * se, f"marginal off at index {k}"
