"""Independent brute-force verifiers for the robust inner/outer problems.

Holds the closed-form solutions of the five scalar optimisation sub-problems
(the lookup-table primitives shared with the production solvers), exhaustive
enumeration of indicator perturbations for the inner supremum, and a dense
log-grid scan of the dual objective. Everything here trades speed for
independence from the solver case logic; enumeration is capped at n <= 6.
"""

from __future__ import annotations

import numpy as np

from .samples import BcvaSample, FvaSample, indicator_move_cost

ENUM_CAP = 6


# ---------------------------------------------------------------------------
# Scalar sub-problem closed forms (numpy-broadcastable in the x arguments)
# ---------------------------------------------------------------------------

def sup_quadratic_linear(y_norm_sq, alpha):
    """sup_w <w,y> - a<w,w> = |y|^2 / (4a)."""
    return np.asarray(y_norm_sq, dtype=float) / (4.0 * alpha)


def sup_capped_linear(cap, alpha, y_norm=1.0):
    """sup_{w <= cap} |y| w - a w^2, the capped one-sided move."""
    m = np.minimum(cap, y_norm / (2.0 * alpha))
    return y_norm * m - alpha * m**2


def sup_positive_part(xi, alpha):
    """sup_w (w + xi)^+ - a w^2 = [1/(4a) + xi]^+."""
    return np.maximum(1.0 / (4.0 * alpha) + np.asarray(xi, dtype=float), 0.0)


def sup_negative_part(xi, alpha):
    """sup_w (w + xi)^- - a w^2, three regimes in xi.

    0 for xi >= 0; -a xi^2 while the move can null the payoff
    (-1/(2a) <= xi <= 0); 1/(4a) + xi below that.
    """
    xi = np.asarray(xi, dtype=float)
    half = 1.0 / (2.0 * alpha)
    inner = -alpha * xi**2
    outer = np.minimum(1.0 / (4.0 * alpha) + xi, 0.0)
    out = np.where((xi >= -half) & (xi <= 0.0), inner, outer)
    return out if out.ndim else float(out)


def sup_negative_part_shifted(x_tau1, x_tau2, alpha):
    """Shifted variant used when the default date moves from tau2 to tau1.

    Written as in the lookup table: the bracket is
    [1/(4a) + x_tau2 + (x_tau1 - x_tau2)]^- with the regime indicator on
    x_tau1, which collapses to sup_negative_part evaluated at x_tau1.
    """
    x_tau1 = np.asarray(x_tau1, dtype=float)
    half = 1.0 / (2.0 * alpha)
    inner = -alpha * x_tau1**2
    outer = np.minimum(1.0 / (4.0 * alpha) + x_tau2 + (x_tau1 - x_tau2), 0.0)
    out = np.where((x_tau1 >= -half) & (x_tau1 <= 0.0), inner, outer)
    return out if out.ndim else float(out)


_SCALAR_KINDS = {
    "unconstrained_linear": lambda alpha, kw: sup_quadratic_linear(kw["y_norm_sq"], alpha),
    "capped_linear": lambda alpha, kw: sup_capped_linear(kw["cap"], alpha, kw.get("y_norm", 1.0)),
    "positive_part": lambda alpha, kw: sup_positive_part(kw["xy"], alpha),
    "negative_part": lambda alpha, kw: sup_negative_part(kw["xy"], alpha),
    "negative_part_shifted": lambda alpha, kw: sup_negative_part_shifted(
        kw["x_tau1"], kw["x_tau2"], alpha
    ),
}


def scalar_subproblem(kind: str, alpha: float, **terms):
    """Closed-form solution of one lookup-table row."""
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    try:
        fn = _SCALAR_KINDS[kind]
    except KeyError:
        raise ValueError(f"unknown scalar sub-problem kind: {kind!r}") from None
    return fn(alpha, terms)


def grid_maximize(objective, lo: float, hi: float, num: int = 100_001) -> float:
    """Dense 1-D grid maximisation used to cross-check the closed forms.

    A second pass re-grids around the coarse argmax so kinked objectives are
    located to ~(width/num^2) accuracy.
    """
    w = np.linspace(lo, hi, num)
    vals = objective(w)
    i = int(np.argmax(vals))
    step = (hi - lo) / (num - 1)
    w2 = np.linspace(max(lo, w[i] - 2 * step), min(hi, w[i] + 2 * step), num)
    return float(max(np.max(vals), np.max(objective(w2))))


# ---------------------------------------------------------------------------
# Exhaustive inner suprema
# ---------------------------------------------------------------------------

def _check_enum_size(n: int):
    if n > ENUM_CAP:
        raise ValueError(f"enumeration capped at n <= {ENUM_CAP}, got {n}")


def _pair_payoff_xi(x: np.ndarray, tc: int, tf: int):
    """(form, xi) of the exposure payoff for a perturbed indicator pair.

    form +1: counterparty defaults first, payoff (u+)_{tc};
    form -1: firm defaults first, payoff (u-)_{tf}; 0: no payoff.
    """
    if tc and (tf == 0 or tc < tf):
        return 1, float(x[tc - 1])
    if tf and (tc == 0 or tf < tc):
        return -1, float(x[tf - 1])
    return 0, 0.0


def brute_psi_bcva(sample: BcvaSample, alpha: float, s3: float) -> float:
    """Enumerate every perturbed indicator pair; solve u coordinatewise."""
    if alpha <= 0 or s3 <= 0:
        raise ValueError("alpha and S3 must be positive")
    n = sample.n
    _check_enum_size(n)
    best = -np.inf
    for tc in range(n + 1):
        for tf in range(n + 1):
            move = indicator_move_cost(tc, sample.tau_c) + indicator_move_cost(tf, sample.tau_f)
            form, xi = _pair_payoff_xi(sample.x, tc, tf)
            if form > 0:
                pay = float(sup_positive_part(xi, alpha))
            elif form < 0:
                pay = float(sup_negative_part(xi, alpha))
            else:
                pay = 0.0
            best = max(best, pay - alpha * s3 * move)
    return best


def brute_psi_fva(sample: FvaSample, alpha: float, s3: float) -> float:
    """Enumerate every survival block length; solve u coordinatewise."""
    if alpha <= 0 or s3 <= 0:
        raise ValueError("alpha and S3 must be positive")
    n = sample.n
    _check_enum_size(n)
    m = sample.survival_length
    prefix = np.concatenate(([0.0], np.cumsum(sample.z)))
    best = -np.inf
    for length in range(n + 1):
        pay = prefix[length] + length * float(sup_quadratic_linear(1.0, alpha))
        best = max(best, pay - alpha * s3 * abs(length - m))
    return best


# ---------------------------------------------------------------------------
# Dense dual scan
# ---------------------------------------------------------------------------

def _scan_objective(samples, delta: float, s3: float, kind: str, alphas: np.ndarray) -> np.ndarray:
    inv4a = 1.0 / (4.0 * alphas)
    total = np.zeros(alphas.size)
    if kind == "bcva":
        n = samples.n
        for sample in samples:
            psi = np.full(alphas.size, -np.inf)
            for tc in range(n + 1):
                for tf in range(n + 1):
                    move = indicator_move_cost(tc, sample.tau_c) + indicator_move_cost(
                        tf, sample.tau_f
                    )
                    form, xi = _pair_payoff_xi(sample.x, tc, tf)
                    if form > 0:
                        pay = np.maximum(inv4a + xi, 0.0)
                    elif form < 0:
                        pay = sup_negative_part(xi, alphas)
                    else:
                        pay = 0.0
                    np.maximum(psi, pay - alphas * s3 * move, out=psi)
            total += psi
    elif kind == "fva":
        for sample in samples:
            prefix = np.concatenate(([0.0], np.cumsum(sample.z)))
            m = sample.survival_length
            psi = np.full(alphas.size, -np.inf)
            for length in range(samples.n + 1):
                val = prefix[length] + length * inv4a - alphas * s3 * abs(length - m)
                np.maximum(psi, val, out=psi)
            total += psi
    else:
        raise ValueError("kind must be 'bcva' or 'fva'")
    return alphas * delta + total / len(samples)


def grid_dual_scan(
    samples,
    delta: float,
    s3: float,
    kind: str,
    num: int = 100_000,
    alpha_min: float = 1e-8,
    alpha_max: float = 1e8,
    return_trace: bool = False,
):
    """Scan F(alpha) = alpha*delta + mean Psi on a log grid of alpha values.

    Psi is evaluated by the enumeration oracles (vectorised across the grid),
    never by the production case logic. A refinement pass re-grids around the
    coarse argmin so kink minima are located to the comparison tolerance.
    Returns (alpha_at_min, F_min) or, with return_trace, the coarse
    (alpha_grid, F_values).
    """
    _check_enum_size(samples.n)
    alphas = np.geomspace(alpha_min, alpha_max, num)
    f_vals = _scan_objective(samples, delta, s3, kind, alphas)
    if return_trace:
        return alphas, f_vals
    i = int(np.argmin(f_vals))
    lo, hi = alphas[max(i - 2, 0)], alphas[min(i + 2, num - 1)]
    fine = np.geomspace(lo, hi, num)
    f_fine = _scan_objective(samples, delta, s3, kind, fine)
    j = int(np.argmin(f_fine))
    if f_fine[j] < f_vals[i]:
        return float(fine[j]), float(f_fine[j])
    return float(alphas[i]), float(f_vals[i])
