"""Vanilla fixed-float swap portfolios priced along simulated rate paths.

Portfolio value at a grid date is reconstructed from model zero-coupon bonds
(affine in the simulated state), discounted to t_0 with the pathwise
money-market account, and split into positive and negative exposure cubes.
Single-curve setup: the floating leg of a swap with maturity T is worth
notional * (1 - P(t, T)) at any reset date t.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .grids import DateGrid
from .hullwhite import ShortRatePaths, bond_log_coeffs


@dataclass(frozen=True)
class SwapSpec:
    """One vanilla swap: notional, maturity (years), fixed coupon, direction."""

    notional: float
    maturity: float
    fixed_rate: float
    receive_fixed: bool
    frequency: int = 4

    def __post_init__(self):
        if self.notional <= 0:
            raise ValueError("notional must be positive")
        if self.maturity <= 0:
            raise ValueError("maturity must be positive")
        if self.frequency < 1:
            raise ValueError("frequency must be at least 1 per year")

    @property
    def direction(self) -> float:
        return 1.0 if self.receive_fixed else -1.0

    def payment_times(self) -> np.ndarray:
        k = int(round(self.maturity * self.frequency))
        return np.arange(1, k + 1) / self.frequency


@dataclass(frozen=True)
class ExposureCube:
    """Discounted portfolio values per path and grid date (t_0 included)."""

    grid: DateGrid
    value: np.ndarray  # (n_paths, n+1)

    def __post_init__(self):
        if self.value.ndim != 2 or self.value.shape[1] != self.grid.times.size:
            raise ValueError("value matrix must be n_paths x (n+1)")

    @cached_property
    def positive(self) -> np.ndarray:
        return np.maximum(self.value, 0.0)

    @cached_property
    def negative(self) -> np.ndarray:
        return np.minimum(self.value, 0.0)

    @property
    def n_paths(self) -> int:
        return self.value.shape[0]


def _aggregate_cash_flows(portfolio, grid: DateGrid):
    """Static fixed-leg cash flows of the portfolio keyed by payment date.

    Receiver value at t decomposes as sum_j CF_j P(t, T_j) - live_notional(t):
    CF carries coupon * accrual plus the notional-equivalent redemption at
    maturity; the float leg contributes the -notional and +P(t, T) pieces.
    """
    flows: dict[float, float] = {}
    horizon = grid.horizon
    for swap in portfolio:
        if swap.maturity > horizon + 1e-9:
            raise ValueError(
                f"swap maturity {swap.maturity}y beyond the {horizon}y grid"
            )
        times = swap.payment_times()
        accr = np.diff(np.concatenate(([0.0], times)))
        for t, d in zip(times, accr):
            key = round(float(t), 12)
            flows[key] = flows.get(key, 0.0) + swap.direction * swap.notional * swap.fixed_rate * d
        mat_key = round(float(times[-1]), 12)
        flows[mat_key] = flows.get(mat_key, 0.0) + swap.direction * swap.notional
    pay_times = np.array(sorted(flows))
    amounts = np.array([flows[t] for t in pay_times])
    return pay_times, amounts


def price_portfolio(paths: ShortRatePaths, portfolio, grid: DateGrid | None = None) -> ExposureCube:
    """Discounted portfolio exposure cube along the simulated paths."""
    if grid is None:
        grid = paths.grid
    elif not np.array_equal(grid.times, paths.grid.times):
        raise ValueError("grid must match the simulation grid")
    if not portfolio:
        raise ValueError("empty portfolio")

    pay_times, amounts = _aggregate_cash_flows(portfolio, grid)
    maturities = np.array([s.maturity for s in portfolio])
    directions = np.array([s.direction * s.notional for s in portfolio])

    params, curve = paths.params, paths.curve
    value = np.zeros_like(paths.x)
    for k, t in enumerate(grid.times):
        live = pay_times > t + 1e-12
        if not np.any(live):
            continue
        coeffs = [bond_log_coeffs(params, curve, float(t), float(T)) for T in pay_times[live]]
        ln_a = np.array([c[0] for c in coeffs])
        b = np.array([c[1] for c in coeffs])
        bonds = np.exp(ln_a[None, :] - np.outer(paths.x[:, k], b))
        float_notional = float(np.sum(directions[maturities > t + 1e-12]))
        value[:, k] = bonds @ amounts[live] - float_notional
    value *= paths.mm_discount
    return ExposureCube(grid, value)
