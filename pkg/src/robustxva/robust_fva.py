"""Robust FVA under a Wasserstein ball around the empirical measure.

The inner supremum per sample reduces to a pointwise max of n+1 convex
functions of the multiplier: with prefix sums P_l = sum_{k<=l} z_k and
m = |y^cf|_1,

    Psi_a(z, y) = <z, y> + max_l h_a(l),
    h_a(l) = l/(4a) + (P_l - P_m) - a*S3*K,   K = |l - m|,

because moving the survival block to length l frees the first l exposure
moves (each worth 1/(4a)) and flips K indicator entries. F(alpha) =
alpha*delta + mean Psi is convex with subdifferential delta + mean of the
convex hulls of {dh/da over active l} = {-l/(4a^2) - S3*K}; the outer
solution looks for 0 in that interval by bisection, with a golden-section
polish when the optimum sits on a kink.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dual import ALPHA_MAX, ALPHA_MIN, DualSolution, golden_section_log
from .errors import WorstCaseUnavailableError
from .samples import FvaSample, FvaSampleSet
from .worstcase import MenuItem, WorstCaseDistribution, greedy_budgeted_moves


@dataclass(frozen=True)
class FvaPsiWitness:
    """Value and attaining point of the inner supremum for one sample."""

    value: float
    l_star: int
    k_moves: int
    u_star: np.ndarray
    payoff: float
    cost: float


@dataclass(frozen=True)
class SubgradientInterval:
    """Bounds of the subdifferential of F at a multiplier value."""

    alpha: float
    lower: float
    upper: float

    def __post_init__(self):
        if self.lower > self.upper + 1e-15:
            raise ValueError("degenerate subgradient interval ordered wrong")

    def contains_zero(self) -> bool:
        return self.lower <= 0.0 <= self.upper


def _sample_h_values(prefix: np.ndarray, m: int, alpha: float, s3: float) -> np.ndarray:
    ls = np.arange(prefix.size)
    return ls / (4.0 * alpha) + (prefix - prefix[m]) - alpha * s3 * np.abs(ls - m)


def psi_alpha_fva(sample: FvaSample, alpha: float, s3: float) -> FvaPsiWitness:
    """Closed-form inner supremum with its witness. Requires alpha > 0."""
    if alpha <= 0:
        raise ValueError("alpha must be strictly positive")
    if s3 <= 0:
        raise ValueError("S3 must be strictly positive")
    prefix = np.concatenate(([0.0], np.cumsum(sample.z)))
    m = sample.survival_length
    h = _sample_h_values(prefix, m, alpha, s3)
    l_star = int(np.argmax(h))  # ties resolve to the smallest block length
    value = float(prefix[m] + h[l_star])
    shift = 0.5 / alpha
    u_star = sample.z.copy()
    u_star[:l_star] += shift
    payoff = float(prefix[l_star] + l_star * shift)
    cost = l_star / (4.0 * alpha**2) + s3 * abs(l_star - m)
    return FvaPsiWitness(value, l_star, abs(l_star - m), u_star, payoff, cost)


class CompiledFvaProblem:
    """Prefix sums packed once so Psi and subgradients vectorise over paths."""

    def __init__(self, samples: FvaSampleSet):
        self.samples = samples
        n = samples.n
        self.prefix = np.concatenate(
            (np.zeros((len(samples), 1)), np.cumsum(samples.z, axis=1)), axis=1
        )
        self.ls = np.arange(n + 1, dtype=float)
        self.absdiff = np.abs(self.ls[None, :] - samples.survival_length[:, None])
        self._payoffs = samples.payoffs()

    def h_matrix(self, alpha: float, s3: float) -> np.ndarray:
        """prefix[l] + l/(4a) - a*S3*|l-m|; Psi is its row max (base cancels)."""
        return self.prefix + self.ls[None, :] / (4.0 * alpha) - alpha * s3 * self.absdiff

    def psi_values(self, alpha: float, s3: float) -> np.ndarray:
        return self.h_matrix(alpha, s3).max(axis=1)

    def subgradient_bounds(self, alpha: float, s3: float) -> tuple[np.ndarray, np.ndarray]:
        vals = self.h_matrix(alpha, s3)
        best = vals.max(axis=1, keepdims=True)
        active = vals >= best - 1e-12 * (1.0 + np.abs(best))
        grads = -self.ls[None, :] / (4.0 * alpha**2) - s3 * self.absdiff
        lo = np.where(active, grads, np.inf).min(axis=1)
        hi = np.where(active, grads, -np.inf).max(axis=1)
        return lo, hi

    def baseline(self) -> float:
        return float(self._payoffs.mean())


def dual_objective_fva(samples, alpha: float, delta: float, s3: float) -> float:
    """F(alpha) = alpha*delta + mean Psi_alpha over the sample set."""
    if alpha <= 0:
        raise ValueError("alpha must be strictly positive")
    problem = samples if isinstance(samples, CompiledFvaProblem) else CompiledFvaProblem(samples)
    return float(alpha * delta + problem.psi_values(alpha, s3).mean())


def subgradient_F_fva(samples, alpha: float, delta: float, s3: float) -> SubgradientInterval:
    """Interval hull of the subdifferential of F at alpha."""
    if alpha <= 0:
        raise ValueError("alpha must be strictly positive")
    problem = samples if isinstance(samples, CompiledFvaProblem) else CompiledFvaProblem(samples)
    lo, hi = problem.subgradient_bounds(alpha, s3)
    return SubgradientInterval(alpha, float(delta + lo.mean()), float(delta + hi.mean()))


def minimize_dual_fva(
    samples: FvaSampleSet,
    delta: float,
    s3: float,
    alpha_min: float = ALPHA_MIN,
    alpha_max: float = ALPHA_MAX,
    rel_tol: float = 1e-10,
    kind: str = "fva",
) -> DualSolution:
    """Bisection on the subgradient sign change, golden polish at kinks."""
    if delta < 0:
        raise ValueError("delta must be non-negative")
    if s3 <= 0:
        raise ValueError("S3 must be strictly positive")
    problem = CompiledFvaProblem(samples)

    def objective(alpha: float) -> float:
        return float(alpha * delta + problem.psi_values(alpha, s3).mean())

    def interval(alpha: float) -> SubgradientInterval:
        lo, hi = problem.subgradient_bounds(alpha, s3)
        return SubgradientInterval(alpha, float(delta + lo.mean()), float(delta + hi.mean()))

    trace: list[tuple[float, float]] = []
    boundary = False
    top = interval(alpha_max)
    bottom = interval(alpha_min)
    if top.upper < 0.0:
        # still decreasing at the cap: the delta = 0 regime
        alpha_star, boundary = alpha_max, True
    elif bottom.lower > 0.0:
        # increasing from the floor; treat like a boundary solution
        alpha_star, boundary = alpha_min, True
    else:
        lo_a, hi_a = alpha_min, alpha_max
        alpha_star = None
        while hi_a / lo_a - 1.0 > rel_tol:
            mid = float(np.sqrt(lo_a * hi_a))
            sub = interval(mid)
            trace.append((mid, objective(mid)))
            if sub.contains_zero():
                alpha_star = mid
                break
            if sub.upper < 0.0:
                lo_a = mid
            else:
                hi_a = mid
        if alpha_star is None:
            # the optimum sits on a kink between lo_a and hi_a
            alpha_star, _ = golden_section_log(
                objective, lo_a / (1.0 + 1e-6), hi_a * (1.0 + 1e-6), rel_tol=1e-10
            )
            for cand in (lo_a, hi_a):
                if objective(cand) < objective(alpha_star):
                    alpha_star = cand

    value = objective(alpha_star)
    trace.append((alpha_star, value))
    witnesses = tuple(psi_alpha_fva(s, alpha_star, s3) for s in samples)
    return DualSolution(
        kind=kind,
        alpha_star=alpha_star,
        value=value,
        delta=delta,
        s3=s3,
        baseline=problem.baseline(),
        boundary=boundary,
        trace=tuple(trace),
        witnesses=witnesses,
    )


def robust_fca(samples: FvaSampleSet, delta: float, s3: float, **kwargs) -> DualSolution:
    """FVA machinery on the z+ sample set."""
    return minimize_dual_fva(samples.cost_component(), delta, s3, kind="fca", **kwargs)


def robust_fba(samples: FvaSampleSet, delta: float, s3: float, **kwargs) -> DualSolution:
    """FVA machinery on the z- sample set."""
    return minimize_dual_fva(samples.benefit_component(), delta, s3, kind="fba", **kwargs)


# ---------------------------------------------------------------------------
# Worst-case distribution recovery
# ---------------------------------------------------------------------------

def _menu_for_sample(sample: FvaSample, alpha: float, s3: float) -> list[MenuItem]:
    prefix = np.concatenate(([0.0], np.cumsum(sample.z)))
    m = sample.survival_length
    shift = 0.5 / alpha
    items = [MenuItem(float(prefix[m]), 0.0, (m, 0.0))]
    for length in range(sample.n + 1):
        items.append(
            MenuItem(
                float(prefix[length] + length * shift),
                length / (4.0 * alpha**2) + s3 * abs(length - m),
                (length, shift),
            )
        )
    return items


def recover_worst_case_fva(
    solution: DualSolution,
    samples: FvaSampleSet,
    delta: float | None = None,
    s3: float | None = None,
) -> WorstCaseDistribution:
    """Build the <= N+1 point worst case attaining the dual optimum."""
    delta = solution.delta if delta is None else delta
    s3 = solution.s3 if s3 is None else s3
    n_samples = len(samples)
    if delta == 0.0:
        return WorstCaseDistribution(
            kind="fva",
            weights=np.full(n_samples, 1.0 / n_samples),
            exposures=samples.z.copy(),
            tau_c=None,
            tau_f=None,
            survival_length=samples.survival_length.copy(),
            origin=np.arange(n_samples),
            split_origin=None,
            transport_cost=0.0,
            delta=0.0,
        )
    if solution.boundary:
        raise WorstCaseUnavailableError(
            "dual solved at the alpha cap; the worst case may not exist"
        )
    alpha = solution.alpha_star
    menus = [_menu_for_sample(s, alpha, s3) for s in samples]
    result = greedy_budgeted_moves(menus, alpha, delta)

    weights, rows, lens, origins = [], [], [], []
    cost_acc = 0.0
    need_pad = result.leftover * n_samples
    for i, sample in enumerate(samples):
        for item, frac in result.picks[i]:
            length, shift = item.payload
            u = sample.z.copy()
            u[:length] += shift
            extra = 0.0
            if need_pad > 0 and frac == 1.0 and length < sample.n:
                u[length] += np.sqrt(need_pad)
                extra = need_pad
                need_pad = 0.0
            cost_acc += (frac / n_samples) * (item.cost + extra)
            weights.append(frac / n_samples)
            rows.append(u)
            lens.append(length)
            origins.append(i)

    return WorstCaseDistribution(
        kind="fva",
        weights=np.array(weights),
        exposures=np.stack(rows),
        tau_c=None,
        tau_f=None,
        survival_length=np.array(lens, dtype=np.int64),
        origin=np.array(origins, dtype=np.int64),
        split_origin=result.split_sample,
        transport_cost=cost_acc,
        delta=delta,
    )
