"""Indicator-vector algebra, Monte Carlo samples and baseline XVA values.

Default indicators live in B1_n (binary, at most one entry equal to 1) and
are stored as a grid index tau in {0..n} with 0 meaning "no default by the
horizon". Survival indicators are blocks (1,...,1,0,...,0) stored as the
block length. Inner products and transport costs have closed forms in index
space, so nothing materialises dense vectors unless asked to.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np


def default_indicator(tau: int, n: int) -> np.ndarray:
    """Materialise the B1_n default vector with a single 1 at index tau."""
    if not 0 <= tau <= n:
        raise ValueError(f"default index {tau} outside 0..{n}")
    vec = np.zeros(n)
    if tau:
        vec[tau - 1] = 1.0
    return vec


def survival_indicator(length: int, n: int) -> np.ndarray:
    """Materialise the block vector with `length` leading ones."""
    if not 0 <= length <= n:
        raise ValueError(f"block length {length} outside 0..{n}")
    vec = np.zeros(n)
    vec[:length] = 1.0
    return vec


def indicator_move_cost(tau_a, tau_b):
    """Squared distance between two default indicators given by index.

    0 if equal, 1 if exactly one is zero (create/remove), 2 if both nonzero
    at different dates (move).
    """
    tau_a = np.asarray(tau_a)
    tau_b = np.asarray(tau_b)
    cost = np.where(tau_a == tau_b, 0, np.where((tau_a == 0) | (tau_b == 0), 1, 2))
    return cost if cost.ndim else int(cost)


@dataclass(frozen=True)
class BcvaSample:
    """One path: recovery-adjusted discounted exposure vector and default indices.

    First-to-default exclusivity holds: at most one of (tau_c, tau_f) is
    nonzero, because each indicator fires only when that party defaults first.
    """

    x: np.ndarray
    tau_c: int
    tau_f: int

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "tau_c", int(self.tau_c))
        object.__setattr__(self, "tau_f", int(self.tau_f))
        n = x.size
        if x.ndim != 1 or n == 0:
            raise ValueError("exposure vector must be 1-D and non-empty")
        if not np.all(np.isfinite(x)):
            raise ValueError("exposure vector must be finite")
        if not (0 <= self.tau_c <= n and 0 <= self.tau_f <= n):
            raise ValueError("default indices outside grid")
        if self.tau_c and self.tau_f:
            raise ValueError("first-to-default exclusivity violated")

    @property
    def n(self) -> int:
        return self.x.size

    def payoff(self) -> float:
        """<x+, y_c> + <x-, y_f> in index form."""
        out = 0.0
        if self.tau_c:
            out += max(self.x[self.tau_c - 1], 0.0)
        if self.tau_f:
            out += min(self.x[self.tau_f - 1], 0.0)
        return out


@dataclass(frozen=True)
class FvaSample:
    """One path: funding exposure vector and joint-survival block length."""

    z: np.ndarray
    survival_length: int

    def __post_init__(self):
        z = np.asarray(self.z, dtype=float)
        object.__setattr__(self, "z", z)
        object.__setattr__(self, "survival_length", int(self.survival_length))
        if z.ndim != 1 or z.size == 0:
            raise ValueError("funding exposure vector must be 1-D and non-empty")
        if not np.all(np.isfinite(z)):
            raise ValueError("funding exposure vector must be finite")
        if not 0 <= self.survival_length <= z.size:
            raise ValueError("survival block length outside grid")

    @property
    def n(self) -> int:
        return self.z.size

    def payoff(self) -> float:
        return float(np.sum(self.z[: self.survival_length]))


class BcvaSampleSet:
    """Uniformly weighted empirical distribution of BCVA samples."""

    def __init__(self, x: np.ndarray, tau_c: np.ndarray, tau_f: np.ndarray):
        x = np.asarray(x, dtype=float)
        tau_c = np.asarray(tau_c, dtype=np.int64)
        tau_f = np.asarray(tau_f, dtype=np.int64)
        if x.ndim != 2 or x.shape[0] == 0:
            raise ValueError("need a non-empty 2-D exposure matrix")
        if tau_c.shape != (x.shape[0],) or tau_f.shape != (x.shape[0],):
            raise ValueError("index arrays must match the number of paths")
        n = x.shape[1]
        if np.any((tau_c < 0) | (tau_c > n) | (tau_f < 0) | (tau_f > n)):
            raise ValueError("default indices outside grid")
        if np.any((tau_c > 0) & (tau_f > 0)):
            raise ValueError("first-to-default exclusivity violated")
        if not np.all(np.isfinite(x)):
            raise ValueError("exposures must be finite")
        self.x = x
        self.tau_c = tau_c
        self.tau_f = tau_f

    @classmethod
    def from_samples(cls, samples: Sequence[BcvaSample]) -> "BcvaSampleSet":
        return cls(
            np.stack([s.x for s in samples]),
            np.array([s.tau_c for s in samples]),
            np.array([s.tau_f for s in samples]),
        )

    def __len__(self) -> int:
        return self.x.shape[0]

    @property
    def n(self) -> int:
        return self.x.shape[1]

    def __iter__(self) -> Iterator[BcvaSample]:
        for i in range(len(self)):
            yield self[i]

    def __getitem__(self, i: int) -> BcvaSample:
        return BcvaSample(self.x[i], int(self.tau_c[i]), int(self.tau_f[i]))

    def payoffs(self) -> np.ndarray:
        rows = np.arange(len(self))
        pos = np.where(self.tau_c > 0, np.maximum(self.x[rows, self.tau_c - 1], 0.0), 0.0)
        neg = np.where(self.tau_f > 0, np.minimum(self.x[rows, self.tau_f - 1], 0.0), 0.0)
        return pos + neg

    def cva_leg(self) -> "BcvaSampleSet":
        """Positive exposures with the firm leg zeroed (unilateral CVA view)."""
        return BcvaSampleSet(np.maximum(self.x, 0.0), self.tau_c.copy(), np.zeros_like(self.tau_f))

    def dva_leg(self) -> "BcvaSampleSet":
        """Negative exposures with the counterparty leg zeroed (unilateral DVA view)."""
        return BcvaSampleSet(np.minimum(self.x, 0.0), np.zeros_like(self.tau_c), self.tau_f.copy())


class FvaSampleSet:
    """Uniformly weighted empirical distribution of FVA samples."""

    def __init__(self, z: np.ndarray, survival_length: np.ndarray):
        z = np.asarray(z, dtype=float)
        lens = np.asarray(survival_length, dtype=np.int64)
        if z.ndim != 2 or z.shape[0] == 0:
            raise ValueError("need a non-empty 2-D funding exposure matrix")
        if lens.shape != (z.shape[0],):
            raise ValueError("length array must match the number of paths")
        if np.any((lens < 0) | (lens > z.shape[1])):
            raise ValueError("survival block length outside grid")
        if not np.all(np.isfinite(z)):
            raise ValueError("funding exposures must be finite")
        self.z = z
        self.survival_length = lens

    @classmethod
    def from_samples(cls, samples: Sequence[FvaSample]) -> "FvaSampleSet":
        return cls(np.stack([s.z for s in samples]),
                   np.array([s.survival_length for s in samples]))

    def __len__(self) -> int:
        return self.z.shape[0]

    @property
    def n(self) -> int:
        return self.z.shape[1]

    def __iter__(self) -> Iterator[FvaSample]:
        for i in range(len(self)):
            yield self[i]

    def __getitem__(self, i: int) -> FvaSample:
        return FvaSample(self.z[i], int(self.survival_length[i]))

    def payoffs(self) -> np.ndarray:
        prefix = np.cumsum(self.z, axis=1)
        padded = np.concatenate((np.zeros((len(self), 1)), prefix), axis=1)
        return padded[np.arange(len(self)), self.survival_length]

    def cost_component(self) -> "FvaSampleSet":
        """z+ sample set (FCA view)."""
        return FvaSampleSet(np.maximum(self.z, 0.0), self.survival_length.copy())

    def benefit_component(self) -> "FvaSampleSet":
        """z- sample set (FBA view)."""
        return FvaSampleSet(np.minimum(self.z, 0.0), self.survival_length.copy())


# ---------------------------------------------------------------------------
# Transport costs
# ---------------------------------------------------------------------------

def cost_bcva_components(u, tau_c_a, tau_f_a, x, tau_c_b, tau_f_b, s3: float) -> float:
    """Transport cost between two general points of (R^n, B1_n, B1_n).

    Unlike engine samples, perturbed points may carry both default indicators
    (the ball is the full product domain), so this takes raw components.
    """
    if s3 <= 0:
        raise ValueError("S3 must be positive")
    u = np.asarray(u, dtype=float)
    x = np.asarray(x, dtype=float)
    if u.shape != x.shape:
        raise ValueError("dimension mismatch")
    du = u - x
    return float(
        s3 * indicator_move_cost(tau_c_a, tau_c_b)
        + s3 * indicator_move_cost(tau_f_a, tau_f_b)
        + du @ du
    )


def cost_bcva(a: BcvaSample, b: BcvaSample, s3: float) -> float:
    """S3 |v1-y1|^2 + S3 |v2-y2|^2 + |u-x|^2 between two BCVA points."""
    return cost_bcva_components(a.x, a.tau_c, a.tau_f, b.x, b.tau_c, b.tau_f, s3)


def cost_fva(a: FvaSample, b: FvaSample, s3: float) -> float:
    """S3 |v-y|^2 + |u-z|^2; block vectors differ in |l_a - l_b| slots."""
    if s3 <= 0:
        raise ValueError("S3 must be positive")
    if a.n != b.n:
        raise ValueError("dimension mismatch")
    du = a.z - b.z
    return float(s3 * abs(a.survival_length - b.survival_length) + du @ du)


# ---------------------------------------------------------------------------
# Baseline (non-robust) values under the empirical measure
# ---------------------------------------------------------------------------

def baseline_bcva(samples: BcvaSampleSet) -> float:
    """(1/N) sum_i [<x+_i, y^c_i> + <x-_i, y^f_i>]."""
    return float(samples.payoffs().mean())


def baseline_unilateral_cva(samples: BcvaSampleSet) -> float:
    rows = np.arange(len(samples))
    pos = np.where(samples.tau_c > 0,
                   np.maximum(samples.x[rows, samples.tau_c - 1], 0.0), 0.0)
    return float(pos.mean())


def baseline_unilateral_dva(samples: BcvaSampleSet) -> float:
    """Reported with the conventional minus sign, so the value is >= 0."""
    rows = np.arange(len(samples))
    neg = np.where(samples.tau_f > 0,
                   np.minimum(samples.x[rows, samples.tau_f - 1], 0.0), 0.0)
    return float(-neg.mean())


def baseline_fva(samples: FvaSampleSet) -> float:
    """(1/N) sum_i <z_i, y^cf_i>."""
    return float(samples.payoffs().mean())


def baseline_fca(samples: FvaSampleSet) -> float:
    return baseline_fva(samples.cost_component())


def baseline_fba(samples: FvaSampleSet) -> float:
    return baseline_fva(samples.benefit_component())
