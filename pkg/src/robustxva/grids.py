"""Observation-date grids.

All dates are ACT/365F decimal year fractions measured from the valuation
date t_0 = 0. Exposure vectors and indicator vectors live on the dates
t_1 < ... < t_n; t_n is the analysis horizon.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class DateGrid:
    """Strictly increasing grid t_0 = 0 < t_1 < ... < t_n."""

    times: np.ndarray

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        object.__setattr__(self, "times", times)
        if times.ndim != 1 or times.size < 2:
            raise ValueError("grid needs at least t_0 and t_1")
        if times[0] != 0.0:
            raise ValueError("grid must start at t_0 = 0")
        if not np.all(np.diff(times) > 0):
            raise ValueError("grid times must be strictly increasing")
        if not np.all(np.isfinite(times)):
            raise ValueError("grid times must be finite")

    @classmethod
    def regular(cls, horizon_years: float, per_year: int) -> "DateGrid":
        n = int(round(horizon_years * per_year))
        if n < 1:
            raise ValueError("horizon too short for the requested frequency")
        return cls(np.arange(n + 1) / per_year)

    @property
    def n(self) -> int:
        """Number of observation dates t_1..t_n."""
        return self.times.size - 1

    @property
    def horizon(self) -> float:
        return float(self.times[-1])

    @property
    def observation_times(self) -> np.ndarray:
        """t_1..t_n (excludes the valuation date)."""
        return self.times[1:]

    @property
    def accruals(self) -> np.ndarray:
        """Year fractions t_k - t_{k-1} for k = 1..n."""
        return np.diff(self.times)
