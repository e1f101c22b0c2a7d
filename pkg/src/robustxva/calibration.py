"""Calibration of the indicator-move scale and the Wasserstein radius.

The scale factor S3 prices a one-date shift of a default time against
exposure-space moves: half the sum of the largest pairwise gaps of the
time-averaged positive and negative exposure profiles. The radius bounds
come from the minimum-cost bipartite matching between two independently
sampled sets: half the matching cost lower-bounds, and the full cost
upper-bounds, the expected transport distance between the empirical and the
true distribution.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .samples import BcvaSampleSet, FvaSampleSet

S3_FLOOR_REL = 1e-8


def _profile_spread(profile: np.ndarray, mode: str) -> float:
    if mode == "pairwise":
        # max over date pairs |p_t1 - p_t2|
        return float(profile.max() - profile.min())
    if mode == "center":
        return float(np.max(np.abs(profile - profile.mean())))
    raise ValueError("mode must be 'pairwise' or 'center'")


def _s3_from_profiles(pos: np.ndarray, neg: np.ndarray, mode: str) -> float:
    raw = 0.5 * (_profile_spread(pos, mode) + _profile_spread(neg, mode))
    scale = max(np.max(np.abs(pos)), np.max(np.abs(neg)), 1.0)
    return max(raw, S3_FLOOR_REL * scale)


def calibrate_s3_bcva(samples: BcvaSampleSet, mode: str = "pairwise") -> float:
    """Half-sum of the positive and negative mean-profile spreads, floored."""
    if len(samples) == 0:
        raise ValueError("empty sample set")
    pos = np.maximum(samples.x, 0.0).mean(axis=0)
    neg = np.minimum(samples.x, 0.0).mean(axis=0)
    return _s3_from_profiles(pos, neg, mode)


def calibrate_s3_fva(samples: FvaSampleSet, mode: str = "pairwise") -> float:
    if len(samples) == 0:
        raise ValueError("empty sample set")
    pos = np.maximum(samples.z, 0.0).mean(axis=0)
    neg = np.minimum(samples.z, 0.0).mean(axis=0)
    return _s3_from_profiles(pos, neg, mode)


def _indicator_cost_matrix(tau_a: np.ndarray, tau_b: np.ndarray) -> np.ndarray:
    ta = tau_a[:, None]
    tb = tau_b[None, :]
    return np.where(ta == tb, 0.0, np.where((ta == 0) | (tb == 0), 1.0, 2.0))


def _sq_distance_matrix(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    sq = (a**2).sum(axis=1)[:, None] + (b**2).sum(axis=1)[None, :] - 2.0 * (a @ b.T)
    return np.maximum(sq, 0.0)


def pairwise_cost_matrix(d1, d2, s3: float) -> np.ndarray:
    """Transport cost between every sample pair of two same-kind sets."""
    if isinstance(d1, BcvaSampleSet) and isinstance(d2, BcvaSampleSet):
        cost = _sq_distance_matrix(d1.x, d2.x)
        cost += s3 * _indicator_cost_matrix(d1.tau_c, d2.tau_c)
        cost += s3 * _indicator_cost_matrix(d1.tau_f, d2.tau_f)
        return cost
    if isinstance(d1, FvaSampleSet) and isinstance(d2, FvaSampleSet):
        cost = _sq_distance_matrix(d1.z, d2.z)
        cost += s3 * np.abs(d1.survival_length[:, None] - d2.survival_length[None, :])
        return cost
    raise TypeError("sample sets must both be BCVA or both FVA")


def min_cost_matching(d1, d2, s3: float, max_size: int | None = None, seed: int = 0):
    """Exact minimum-cost perfect matching between two equal-size sets.

    Returns (average matched cost, column assignment). The average over
    matched pairs equals the optimal-transport discrepancy between the two
    uniform empirical measures. Sets larger than max_size are subsampled
    (documented approximation for very large books).
    """
    if len(d1) != len(d2):
        raise ValueError("sample sets must have equal size")
    if len(d1) == 0:
        raise ValueError("empty sample sets")
    if max_size is not None and len(d1) > max_size:
        rng = np.random.default_rng(seed)
        keep1 = np.sort(rng.choice(len(d1), size=max_size, replace=False))
        keep2 = np.sort(rng.choice(len(d2), size=max_size, replace=False))
        d1 = _subset(d1, keep1)
        d2 = _subset(d2, keep2)
    cost = pairwise_cost_matrix(d1, d2, s3)
    rows, cols = linear_sum_assignment(cost)
    avg = float(cost[rows, cols].sum() / len(d1))
    return avg, cols


def _subset(dset, idx):
    if isinstance(dset, BcvaSampleSet):
        return BcvaSampleSet(dset.x[idx], dset.tau_c[idx], dset.tau_f[idx])
    return FvaSampleSet(dset.z[idx], dset.survival_length[idx])


@dataclass(frozen=True)
class RadiusBounds:
    """Lower/upper Wasserstein radii from the two-set matching cost."""

    delta_lower: float
    delta_upper: float
    matching_cost: float

    def __post_init__(self):
        if self.delta_lower > self.delta_upper:
            raise ValueError("lower radius above upper radius")

    def grid(self, percentages=(50, 60, 70, 80, 90, 100)) -> dict[float, float]:
        """Radii at the requested percentages of the upper bound."""
        return {float(p): self.delta_upper * p / 100.0 for p in percentages}


def wasserstein_radius_bounds(d1, d2, s3: float, max_size: int | None = None) -> RadiusBounds:
    """delta_l = c*/2 and delta_u = c* from the minimum bipartite matching."""
    c_star, _ = min_cost_matching(d1, d2, s3, max_size=max_size)
    return RadiusBounds(delta_lower=0.5 * c_star, delta_upper=c_star, matching_cost=c_star)
