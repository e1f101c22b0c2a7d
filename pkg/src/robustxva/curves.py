"""Discount, hazard and funding curves bootstrapped from market quote tables.

Conventions (applied uniformly, see README):
  * ACT/365F decimal years everywhere;
  * discount curve: log-linear interpolation of DF between pillars, flat
    zero rate beyond the last pillar;
  * hazard curve: piecewise-constant intensity per quote bucket;
  * par swaps quoted against an annual fixed leg and a single-curve float
    leg worth 1 - DF(T) at inception.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np
from scipy.optimize import brentq

from .errors import BootstrapError
from .grids import DateGrid


def _as_tenor_pairs(quotes) -> list[tuple[float, float]]:
    if isinstance(quotes, Mapping):
        pairs = [(float(t), float(v)) for t, v in quotes.items()]
    else:
        pairs = [(float(t), float(v)) for t, v in quotes]
    if not pairs:
        raise ValueError("empty quote table")
    return pairs


@dataclass(frozen=True)
class DiscountCurve:
    """Zero curve with DF(t) = exp(-z(t) * t).

    ln DF is interpolated linearly in t between (0, 0) and the pillar knots,
    and continues at the last pillar's zero rate beyond the end.
    """

    pillar_times: np.ndarray
    zero_rates: np.ndarray

    def __post_init__(self):
        t = np.atleast_1d(np.asarray(self.pillar_times, dtype=float))
        z = np.atleast_1d(np.asarray(self.zero_rates, dtype=float))
        if t.size != z.size or t.size == 0:
            raise ValueError("pillar_times and zero_rates must match and be non-empty")
        if t[0] <= 0 or not np.all(np.diff(t) > 0):
            raise ValueError("pillar times must be positive and strictly increasing")
        if not (np.all(np.isfinite(t)) and np.all(np.isfinite(z))):
            raise ValueError("curve inputs must be finite")
        object.__setattr__(self, "pillar_times", t)
        object.__setattr__(self, "zero_rates", z)
        object.__setattr__(self, "_knots", np.concatenate(([0.0], t)))
        object.__setattr__(self, "_log_dfs", np.concatenate(([0.0], -z * t)))

    def log_df(self, t):
        t = np.asarray(t, dtype=float)
        inside = np.interp(t, self._knots, self._log_dfs)
        beyond = -self.zero_rates[-1] * t
        out = np.where(t <= self.pillar_times[-1], inside, beyond)
        return out if out.ndim else float(out)

    def df(self, t):
        return np.exp(self.log_df(t))

    def zero(self, t):
        t = np.asarray(t, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            z = np.where(t > 0, -self.log_df(t) / np.where(t > 0, t, 1.0), self.zero_rates[0])
        return z if z.ndim else float(z)

    def instantaneous_forward(self, t):
        """Piecewise-constant forward implied by the log-linear DF segments."""
        t = np.asarray(t, dtype=float)
        idx = np.clip(np.searchsorted(self._knots, t, side="right") - 1, 0, self._knots.size - 2)
        seg = -(self._log_dfs[idx + 1] - self._log_dfs[idx]) / (self._knots[idx + 1] - self._knots[idx])
        out = np.where(t < self.pillar_times[-1], seg, self.zero_rates[-1])
        return out if out.ndim else float(out)


def _swap_fixed_times(tenor: float, frequency: int) -> np.ndarray:
    k = int(round(tenor * frequency))
    if k < 1 or abs(k / frequency - tenor) > 1e-9:
        raise BootstrapError(f"swap tenor {tenor} not a whole number of fixed periods")
    return np.arange(1, k + 1) / frequency


def swap_par_npv(curve: DiscountCurve, tenor: float, rate: float, frequency: int = 1) -> float:
    """Receiver NPV per unit notional: fixed annuity leg minus (1 - DF(T))."""
    times = _swap_fixed_times(tenor, frequency)
    dfs = curve.df(times)
    fixed = rate * np.sum(np.diff(np.concatenate(([0.0], times))) * dfs)
    floating = 1.0 - dfs[-1]
    return float(fixed - floating)


def bootstrap_discount_curve(swap_rates, fixed_frequency: int = 1) -> DiscountCurve:
    """Bootstrap zero rates so each input par swap has zero NPV.

    Pillars sit at the quoted tenors; payment dates between pillars pick up
    the interpolated discount factors, so each pillar is solved with a root
    find rather than in closed form.
    """
    quotes = _as_tenor_pairs(swap_rates)
    tenors = [t for t, _ in quotes]
    if any(b <= a for a, b in zip(tenors, tenors[1:])):
        raise BootstrapError("swap tenors must be strictly increasing")

    pillars: list[float] = []
    zeros: list[float] = []
    for tenor, rate in quotes:
        def npv(z: float) -> float:
            trial = DiscountCurve(np.array(pillars + [tenor]), np.array(zeros + [z]))
            return swap_par_npv(trial, tenor, rate, fixed_frequency)

        lo, hi = -0.5, 2.0
        if npv(lo) * npv(hi) > 0:
            raise BootstrapError(f"no discount factor solves the {tenor}y pillar")
        z_star = brentq(npv, lo, hi, xtol=1e-16, rtol=1e-15, maxiter=200)
        pillars.append(tenor)
        zeros.append(z_star)
    return DiscountCurve(np.array(pillars), np.array(zeros))


@dataclass(frozen=True)
class HazardCurve:
    """Piecewise-constant default intensity.

    hazard_rates[k] applies on (pillar_{k-1}, pillar_k], with pillar_{-1}=0;
    the last rate extends beyond the final pillar. S(t) = exp(-H(t)).
    """

    pillar_times: np.ndarray
    hazard_rates: np.ndarray

    def __post_init__(self):
        t = np.atleast_1d(np.asarray(self.pillar_times, dtype=float))
        lam = np.atleast_1d(np.asarray(self.hazard_rates, dtype=float))
        if t.size != lam.size or t.size == 0:
            raise ValueError("pillar_times and hazard_rates must match and be non-empty")
        if t[0] <= 0 or not np.all(np.diff(t) > 0):
            raise ValueError("pillar times must be positive and strictly increasing")
        if np.any(lam < 0):
            raise ValueError("hazard rates must be non-negative")
        object.__setattr__(self, "pillar_times", t)
        object.__setattr__(self, "hazard_rates", lam)
        knots = np.concatenate(([0.0], t))
        cum = np.concatenate(([0.0], np.cumsum(lam * np.diff(knots))))
        object.__setattr__(self, "_knots", knots)
        object.__setattr__(self, "_cum", cum)

    def cumulative_hazard(self, t):
        t = np.asarray(t, dtype=float)
        inside = np.interp(t, self._knots, self._cum)
        beyond = self._cum[-1] + self.hazard_rates[-1] * (t - self._knots[-1])
        out = np.where(t <= self._knots[-1], inside, beyond)
        return out if out.ndim else float(out)

    def survival(self, t):
        return np.exp(-self.cumulative_hazard(t))


def cds_npv(
    hazard: HazardCurve,
    maturity: float,
    spread: float,
    recovery: float,
    discount: DiscountCurve | None = None,
    premium_frequency: int = 4,
) -> float:
    """Premium leg minus protection leg per unit notional.

    Premium accrues on survival plus half-period accrual on default;
    protection pays (1-R) at the period midpoint.
    """
    k = max(int(round(maturity * premium_frequency)), 1)
    times = np.arange(1, k + 1) / premium_frequency
    prev = np.concatenate(([0.0], times[:-1]))
    accrual = times - prev
    mid = 0.5 * (times + prev)
    df_pay = discount.df(times) if discount is not None else np.ones_like(times)
    df_mid = discount.df(mid) if discount is not None else np.ones_like(times)
    s_prev = hazard.survival(prev)
    s_now = hazard.survival(times)
    defaulted = s_prev - s_now
    premium = spread * np.sum(accrual * df_pay * s_now) + spread * np.sum(0.5 * accrual * df_pay * defaulted)
    protection = (1.0 - recovery) * np.sum(df_mid * defaulted)
    return float(premium - protection)


def bootstrap_hazard_curve(
    cds_spreads,
    recovery: float,
    discount: DiscountCurve | None = None,
    premium_frequency: int = 4,
) -> HazardCurve:
    """Bootstrap piecewise-constant intensities so each CDS reprices to zero.

    For a flat spread s the result is close to the credit triangle
    lambda = s / (1 - R).
    """
    if not 0.0 <= recovery < 1.0:
        raise ValueError("recovery must be in [0, 1)")
    quotes = _as_tenor_pairs(cds_spreads)
    tenors = [t for t, _ in quotes]
    if any(b <= a for a, b in zip(tenors, tenors[1:])):
        raise BootstrapError("CDS tenors must be strictly increasing")
    if any(s < 0 for _, s in quotes):
        raise BootstrapError("CDS spreads must be non-negative")

    pillars: list[float] = []
    lambdas: list[float] = []
    for tenor, spread in quotes:
        def npv(lam: float) -> float:
            trial = HazardCurve(np.array(pillars + [tenor]), np.array(lambdas + [lam]))
            return cds_npv(trial, tenor, spread, recovery, discount, premium_frequency)

        at_zero = npv(0.0)
        if abs(at_zero) < 1e-14:
            lam_star = 0.0
        elif at_zero < 0:
            raise BootstrapError(f"implied hazard is negative at the {tenor}y tenor")
        else:
            hi = 20.0
            if npv(hi) > 0:
                raise BootstrapError(f"no non-negative hazard reprices the {tenor}y tenor")
            lam_star = brentq(npv, 0.0, hi, xtol=1e-15, rtol=1e-14, maxiter=200)
        pillars.append(tenor)
        lambdas.append(lam_star)
    return HazardCurve(np.array(pillars), np.array(lambdas))


def flat_hazard_curve(spread: float, recovery: float, horizon: float = 30.0) -> HazardCurve:
    """Single-bucket curve repricing a flat CDS spread out to `horizon`."""
    return bootstrap_hazard_curve([(horizon, spread)], recovery)


@dataclass(frozen=True)
class FundingCurve:
    """Term structure of funding spreads with a lognormal shock model.

    Spreads are decimal per annum, linearly interpolated in tenor and flat
    outside the quoted range. The per-period factors applied to exposures are
    spread(t_k) * (t_k - t_{k-1}). Shock volatility decays exponentially from
    vol_initial at t=0 to vol_final at vol_horizon.
    """

    tenors: np.ndarray
    cost_spreads: np.ndarray
    benefit_spreads: np.ndarray | None = None
    vol_initial: float = 0.0
    vol_final: float = 0.0
    vol_horizon: float = 10.0

    def __post_init__(self):
        t = np.atleast_1d(np.asarray(self.tenors, dtype=float))
        c = np.atleast_1d(np.asarray(self.cost_spreads, dtype=float))
        b = self.benefit_spreads
        b = c.copy() if b is None else np.atleast_1d(np.asarray(b, dtype=float))
        if not (t.size == c.size == b.size) or t.size == 0:
            raise ValueError("tenor/spread arrays must match and be non-empty")
        if not np.all(np.diff(t) > 0):
            raise ValueError("funding tenors must be strictly increasing")
        if not (np.all(np.isfinite(c)) and np.all(np.isfinite(b))):
            raise ValueError("funding spreads must be finite")
        if self.vol_initial < 0 or self.vol_final < 0:
            raise ValueError("vols must be non-negative")
        object.__setattr__(self, "tenors", t)
        object.__setattr__(self, "cost_spreads", c)
        object.__setattr__(self, "benefit_spreads", b)

    def cost_spread(self, t):
        return np.interp(np.asarray(t, dtype=float), self.tenors, self.cost_spreads)

    def benefit_spread(self, t):
        return np.interp(np.asarray(t, dtype=float), self.tenors, self.benefit_spreads)

    def vol(self, t):
        t = np.asarray(t, dtype=float)
        if self.vol_initial <= 0:
            return np.zeros_like(t)
        if self.vol_final <= 0 or self.vol_final == self.vol_initial:
            decay = 0.0
        else:
            decay = np.log(self.vol_initial / self.vol_final) / self.vol_horizon
        return self.vol_initial * np.exp(-decay * t)

    def period_cost(self, grid: DateGrid) -> np.ndarray:
        """f_c(t_{k-1}, t_k) for k = 1..n: annual spread times accrual."""
        return self.cost_spread(grid.observation_times) * grid.accruals

    def period_benefit(self, grid: DateGrid) -> np.ndarray:
        return self.benefit_spread(grid.observation_times) * grid.accruals

    def simulate_shocks(self, grid: DateGrid, n_paths: int, rng: np.random.Generator) -> np.ndarray:
        """Martingale lognormal factors exp(sigma_k W(t_k) - sigma_k^2 t_k / 2).

        One Brownian driver per path, shared by cost and benefit spreads and
        independent of the rates factor. Shape (n_paths, n).
        """
        obs = grid.observation_times
        if self.vol_initial <= 0:
            return np.ones((n_paths, obs.size))
        dw = rng.standard_normal((n_paths, obs.size)) * np.sqrt(grid.accruals)
        w = np.cumsum(dw, axis=1)
        sig = self.vol(obs)
        return np.exp(sig * w - 0.5 * sig**2 * obs)
