"""Shared machinery for the outer dual minimisation over the multiplier.

F(alpha) = alpha*delta + mean_i Psi_alpha(sample_i) is convex; alpha = 0 is
excluded (the inner supremum is unbounded there whenever the payoff grows),
so the search runs on [alpha_min, alpha_max] in log space. The delta = 0
problem has F decreasing towards the cap; those solutions carry a boundary
flag and recover the baseline value in the large-alpha limit.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

ALPHA_MIN = 1e-8
ALPHA_MAX = 1e8

_INV_GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class DualSolution:
    """Solved dual problem for one (sample set, delta, S3) instance.

    `value` is the dual optimum (the robust supremum). `reported_value`
    carries the sign convention of the metric (DVA flips the sign).
    `witnesses` holds the per-sample inner-supremum witnesses at alpha_star.
    """

    kind: str
    alpha_star: float
    value: float
    delta: float
    s3: float
    baseline: float
    boundary: bool
    trace: tuple
    witnesses: tuple
    reported_value: float = None  # type: ignore[assignment]

    def __post_init__(self):
        if self.reported_value is None:
            object.__setattr__(self, "reported_value", self.value)

    @property
    def uncertainty_penalty(self) -> float:
        """Robust value minus baseline (the price of the ambiguity ball)."""
        return self.value - self.baseline


def golden_section_log(
    objective: Callable[[float], float],
    lo: float,
    hi: float,
    rel_tol: float = 1e-8,
    trace: list | None = None,
) -> tuple[float, float]:
    """Golden-section minimisation over log(alpha) on [lo, hi].

    Convexity of F in alpha makes it unimodal under the monotone
    reparameterisation, which is all golden section needs.
    """
    a, b = np.log(lo), np.log(hi)
    span = b - a
    c = b - _INV_GOLDEN * span
    d = a + _INV_GOLDEN * span
    fc, fd = objective(np.exp(c)), objective(np.exp(d))
    if trace is not None:
        trace.extend([(float(np.exp(c)), fc), (float(np.exp(d)), fd)])
    while (b - a) > np.log1p(rel_tol):
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - _INV_GOLDEN * (b - a)
            fc = objective(np.exp(c))
            if trace is not None:
                trace.append((float(np.exp(c)), fc))
        else:
            a, c, fc = c, d, fd
            d = a + _INV_GOLDEN * (b - a)
            fd = objective(np.exp(d))
            if trace is not None:
                trace.append((float(np.exp(d)), fd))
    x = np.exp(0.5 * (a + b))
    return float(x), objective(float(x))


def minimize_convex_on_log_grid(
    objective: Callable[[float], float],
    alpha_min: float = ALPHA_MIN,
    alpha_max: float = ALPHA_MAX,
    coarse: int = 97,
    rel_tol: float = 1e-8,
) -> tuple[float, float, bool, list]:
    """Bracket on a geometric grid, then golden-section to rel_tol.

    Returns (alpha_star, value, boundary, trace). `boundary` is set when F is
    still decreasing at alpha_max, the delta = 0 regime.
    """
    grid = np.geomspace(alpha_min, alpha_max, coarse)
    vals = np.array([objective(a) for a in grid])
    trace = list(zip(grid.tolist(), vals.tolist()))
    i = int(np.argmin(vals))
    if i == coarse - 1:
        return float(grid[-1]), float(vals[-1]), True, trace
    lo = grid[max(i - 1, 0)]
    hi = grid[i + 1]
    x, fx = golden_section_log(objective, lo, hi, rel_tol, trace)
    # keep the better of the polished point and the coarse argmin
    if vals[i] < fx:
        x, fx = float(grid[i]), float(vals[i])
    return x, fx, False, trace
