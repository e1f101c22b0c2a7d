"""One-factor Hull-White model: calibration and exact-transition simulation.

The short rate is decomposed as r(t) = x(t) + phi(t) with

    dx = -a x dt + sigma(t) dW,   x(0) = 0,

and phi chosen so today's discount curve is repriced exactly. Zero-coupon
bonds are affine in x:

    P(t,T) = DF(T)/DF(t) * exp(-B(t,T) x(t) + 0.5 [V(t,T) - V(0,T) + V(0,t)])

with B(t,T) = (1 - e^{-a(T-t)})/a and V(t,T) = int_t^T sigma(u)^2 B(u,T)^2 du.
Simulation samples (x(t_{k+1}), int_{t_k}^{t_{k+1}} x du) jointly from the
exact bivariate normal transition, so the pathwise money-market discount
factor is unbiased at every grid date (martingale test in the suite).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np
from scipy.optimize import brentq, least_squares
from scipy.stats import norm

from .curves import DiscountCurve
from .errors import CalibrationError
from .grids import DateGrid


@dataclass(frozen=True)
class HwParams:
    """Mean reversion a > 0 and piecewise-constant volatility.

    sigma(t) = vol_values[i] on [vol_breaks[i-1], vol_breaks[i]) with
    vol_breaks[-1] = 0 implied; the last value extends to infinity.
    """

    mean_reversion: float
    vol_breaks: np.ndarray
    vol_values: np.ndarray

    def __post_init__(self):
        breaks = np.atleast_1d(np.asarray(self.vol_breaks, dtype=float))
        values = np.atleast_1d(np.asarray(self.vol_values, dtype=float))
        if breaks.size and not np.all(np.diff(breaks) > 0):
            raise ValueError("vol breakpoints must be strictly increasing")
        if values.size != breaks.size + 1:
            raise ValueError("need len(vol_values) == len(vol_breaks) + 1")
        if self.mean_reversion <= 0:
            raise ValueError("mean reversion must be positive")
        if np.any(values < 0):
            raise ValueError("volatilities must be non-negative")
        object.__setattr__(self, "vol_breaks", breaks)
        object.__setattr__(self, "vol_values", values)

    @classmethod
    def constant(cls, mean_reversion: float, sigma: float) -> "HwParams":
        return cls(mean_reversion, np.array([]), np.array([sigma]))

    def sigma(self, t):
        idx = np.searchsorted(self.vol_breaks, np.asarray(t, dtype=float), side="right")
        return self.vol_values[idx]


def b_factor(a: float, dt):
    return (1.0 - np.exp(-a * np.asarray(dt, dtype=float))) / a


def _piece_edges(params: HwParams, s: float, t: float) -> np.ndarray:
    inner = params.vol_breaks[(params.vol_breaks > s) & (params.vol_breaks < t)]
    return np.concatenate(([s], inner, [t]))


def transition_integrals(params: HwParams, s: float, t: float) -> tuple[float, float, float]:
    """(var_x, var_I, cov_xI) of (x(t), int_s^t x du) given x(s), x-part only.

    var_x = int sigma^2 e^{-2a(t-u)} du
    var_I = int sigma^2 B(u,t)^2 du
    cov   = int sigma^2 e^{-a(t-u)} B(u,t) du
    """
    if t <= s:
        return 0.0, 0.0, 0.0
    a = params.mean_reversion
    edges = _piece_edges(params, s, t)
    var_x = var_i = cov = 0.0
    for u1, u2 in zip(edges[:-1], edges[1:]):
        sig2 = float(params.sigma(0.5 * (u1 + u2))) ** 2
        if sig2 == 0.0:
            continue
        tau1, tau2 = t - u1, t - u2  # tau1 >= tau2
        e1, e2 = np.exp(-a * tau1), np.exp(-a * tau2)
        var_x += sig2 * (e2**2 - e1**2) / (2 * a)
        var_i += sig2 / a**2 * (
            (tau1 - tau2) + (2 / a) * (e1 - e2) - (1 / (2 * a)) * (e1**2 - e2**2)
        )
        cov += sig2 / a * ((e2 - e1) / a - (e2**2 - e1**2) / (2 * a))
    return var_x, var_i, cov


def bond_log_coeffs(params: HwParams, curve: DiscountCurve, t: float, T: float) -> tuple[float, float]:
    """(ln A, B) with P(t,T;x) = exp(ln A - B x)."""
    b = float(b_factor(params.mean_reversion, T - t))
    v_t_T = transition_integrals(params, t, T)[1]
    v_0_T = transition_integrals(params, 0.0, T)[1]
    v_0_t = transition_integrals(params, 0.0, t)[1]
    ln_a = float(curve.log_df(T) - curve.log_df(t)) + 0.5 * (v_t_T - v_0_T + v_0_t)
    return ln_a, b


@dataclass(frozen=True)
class ShortRatePaths:
    """Simulated state with enough structure to price and discount pathwise."""

    grid: DateGrid
    params: HwParams
    curve: DiscountCurve
    x: np.ndarray            # (n_paths, n+1) mean-zero state
    short_rate: np.ndarray   # (n_paths, n+1)
    mm_discount: np.ndarray  # (n_paths, n+1) exp(-int_0^{t_k} r du)

    @property
    def n_paths(self) -> int:
        return self.x.shape[0]


def simulate_short_rates(
    params: HwParams,
    curve: DiscountCurve,
    grid: DateGrid,
    n_paths: int,
    seed,
) -> ShortRatePaths:
    """Exact-transition simulation of the short rate on the grid.

    `seed` may be an int or a numpy Generator. Draws are consumed in a single
    vectorised call, so output depends only on (params, curve, grid, n_paths,
    seed).
    """
    if n_paths < 1:
        raise ValueError("n_paths must be >= 1")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    times = grid.times
    n_steps = grid.n
    a = params.mean_reversion

    z = rng.standard_normal((n_paths, n_steps, 2))
    x = np.zeros((n_paths, n_steps + 1))
    int_x = np.zeros((n_paths, n_steps + 1))
    for k in range(n_steps):
        s, t = times[k], times[k + 1]
        decay = np.exp(-a * (t - s))
        b_step = b_factor(a, t - s)
        var_x, var_i, cov = transition_integrals(params, s, t)
        sd_x = np.sqrt(var_x)
        if sd_x > 0:
            slope = cov / var_x
            resid = np.sqrt(max(var_i - cov**2 / var_x, 0.0))
            shock_x = sd_x * z[:, k, 0]
            shock_i = slope * shock_x + resid * z[:, k, 1]
        else:
            shock_x = shock_i = 0.0
        x[:, k + 1] = x[:, k] * decay + shock_x
        int_x[:, k + 1] = int_x[:, k] + x[:, k] * b_step + shock_i

    v0 = np.array([transition_integrals(params, 0.0, t)[1] for t in times])
    cov0 = np.array([transition_integrals(params, 0.0, t)[2] for t in times])
    int_phi = -curve.log_df(times) + 0.5 * v0
    phi = curve.instantaneous_forward(times) + cov0

    short_rate = x + phi[None, :]
    mm_discount = np.exp(-(int_x + int_phi[None, :]))
    return ShortRatePaths(grid, params, curve, x, short_rate, mm_discount)


# ---------------------------------------------------------------------------
# Swaption pricing and calibration to a normal-vol surface
# ---------------------------------------------------------------------------

def swap_annuity_and_atm(curve: DiscountCurve, expiry: float, tenor: float,
                         fixed_frequency: int = 1) -> tuple[np.ndarray, float, float]:
    """Payment times, annuity and forward par rate of the underlying swap."""
    k = int(round(tenor * fixed_frequency))
    pay_times = expiry + np.arange(1, k + 1) / fixed_frequency
    accr = np.diff(np.concatenate(([expiry], pay_times)))
    annuity = float(np.sum(accr * curve.df(pay_times)))
    atm = float((curve.df(expiry) - curve.df(pay_times[-1])) / annuity)
    return pay_times, annuity, atm


def zero_bond_put(params: HwParams, curve: DiscountCurve, expiry: float,
                  maturity: float, strike: float) -> float:
    """Put on P(expiry, maturity), struck at `strike`, value today."""
    df_e, df_m = curve.df(expiry), curve.df(maturity)
    sd = b_factor(params.mean_reversion, maturity - expiry) * np.sqrt(
        transition_integrals(params, 0.0, expiry)[0]
    )
    forward = df_m / df_e
    if sd < 1e-14:
        return df_e * max(strike - forward, 0.0)
    d1 = (np.log(forward / strike) + 0.5 * sd**2) / sd
    d2 = d1 - sd
    return float(df_e * strike * norm.cdf(-d2) - df_m * norm.cdf(-d1))


def payer_swaption_price(params: HwParams, curve: DiscountCurve, expiry: float,
                         tenor: float, strike: float, fixed_frequency: int = 1) -> float:
    """European payer swaption via the one-factor coupon-bond decomposition."""
    pay_times, _, _ = swap_annuity_and_atm(curve, expiry, tenor, fixed_frequency)
    accr = np.diff(np.concatenate(([expiry], pay_times)))
    coupons = strike * accr
    coupons[-1] += 1.0
    coeffs = [bond_log_coeffs(params, curve, expiry, T) for T in pay_times]
    ln_a = np.array([c[0] for c in coeffs])
    b = np.array([c[1] for c in coeffs])

    if transition_integrals(params, 0.0, expiry)[0] < 1e-30:
        intrinsic = curve.df(expiry) - float(np.sum(coupons * curve.df(pay_times)))
        return max(intrinsic, 0.0)

    def coupon_bond(xv: float) -> float:
        return float(np.sum(coupons * np.exp(ln_a - b * xv))) - 1.0

    lo, hi = -1.0, 1.0
    while coupon_bond(lo) < 0:
        lo *= 2.0
        if lo < -1e3:
            raise CalibrationError("coupon bond root bracketing failed (low side)")
    while coupon_bond(hi) > 0:
        hi *= 2.0
        if hi > 1e3:
            raise CalibrationError("coupon bond root bracketing failed (high side)")
    x_star = brentq(coupon_bond, lo, hi, xtol=1e-14, rtol=1e-13)

    strikes = np.exp(ln_a - b * x_star)
    return float(sum(
        c * zero_bond_put(params, curve, expiry, T, k)
        for c, T, k in zip(coupons, pay_times, strikes)
    ))


def model_atm_normal_vol(params: HwParams, curve: DiscountCurve, expiry: float,
                         tenor: float, fixed_frequency: int = 1) -> float:
    """Implied Bachelier vol of the ATM payer swaption under the model.

    At the money the Bachelier price is annuity * vol * sqrt(expiry / 2 pi),
    so the inversion is exact.
    """
    _, annuity, atm = swap_annuity_and_atm(curve, expiry, tenor, fixed_frequency)
    price = payer_swaption_price(params, curve, expiry, tenor, atm, fixed_frequency)
    return float(price / (annuity * np.sqrt(expiry / (2.0 * np.pi))))


def calibrate_hull_white(
    vol_surface: Mapping[tuple[float, float], float],
    curve: DiscountCurve,
    mean_reversion: float = 0.03,
    fixed_frequency: int = 1,
    max_nfev: int = 200,
) -> tuple[HwParams, float]:
    """Least-squares fit of piecewise-constant sigma to ATM normal vols.

    Mean reversion is held fixed (supplied by configuration). One vol bucket
    per distinct expiry; the last bucket extends beyond the final expiry.
    Returns (params, relative RMSE of the fit).
    """
    if not vol_surface:
        raise ValueError("empty volatility surface")
    points = sorted(vol_surface.items())
    expiries = sorted({e for (e, _), _ in points})
    breaks = np.array(expiries)
    floor = 1e-4  # vols quoted near zero get an absolute scale

    def build(free: np.ndarray) -> HwParams:
        values = np.concatenate((free, [free[-1]]))
        return HwParams(mean_reversion, breaks, values)

    def residuals(free: np.ndarray) -> np.ndarray:
        params = build(np.abs(free))
        out = np.empty(len(points))
        for i, ((expiry, tenor), mkt) in enumerate(points):
            model = model_atm_normal_vol(params, curve, expiry, tenor, fixed_frequency)
            out[i] = (model - mkt) / max(mkt, floor)
        return out

    x0 = np.full(len(expiries), max(np.mean([v for _, v in points]), 1e-5))
    fit = least_squares(residuals, x0, method="lm", max_nfev=max_nfev)
    rmse = float(np.sqrt(np.mean(fit.fun**2)))
    if fit.status == 0:
        raise CalibrationError(
            f"Hull-White calibration hit max function evaluations (residual {rmse:.3%})",
            best_residual=rmse,
        )
    return build(np.abs(fit.x)), rmse
