"""Robust bilateral CVA under a Wasserstein ball around the empirical measure.

The inner supremum per sample,

    Psi_a(x, y_c, y_f) = sup_{u, v1, v2} [ <u+, 1{v1<v2} v1> + <u-, 1{v2<v1} v2>
                                            - a (|u-x|^2 + S3 |v1-y_c|^2 + S3 |v2-y_f|^2) ],

decomposes over a finite candidate list: for each admissible way of keeping,
moving, creating or removing the two default indicators, the exposure move
solves a scalar problem in closed form (positive-part or negative-part type)
and the indicator moves charge a * S3 * K with K the number of flipped
entries. The best new default date within a candidate is an argmax of the
exposure over the admissible index range, so evaluation is O(n) per sample
and independent of alpha-specific search.

The outer problem inf_{a>0} [ a*delta + mean Psi_a ] is convex and solved by
bracketing plus golden section on log(alpha); delta = 0 rides the alpha cap
(boundary flag) and recovers the baseline value.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dual import ALPHA_MAX, ALPHA_MIN, DualSolution, minimize_convex_on_log_grid
from .errors import WorstCaseUnavailableError
from .samples import BcvaSample, BcvaSampleSet
from .worstcase import MenuItem, WorstCaseDistribution, greedy_budgeted_moves

FORM_ZERO, FORM_POS, FORM_NEG = 0, 1, 2


@dataclass(frozen=True)
class _Candidate:
    """One admissible indicator configuration for the inner supremum.

    form selects the scalar payoff solved over the exposure move at `coord`
    (1-based; 0 when no coordinate pays). k_moves counts flipped indicator
    entries. (new_tau_c, new_tau_f) is the perturbed configuration, with new
    defaults placed at the latest admissible date when the case only needs
    *some* admissible date.
    """

    label: str
    form: int
    xi: float
    k_moves: int
    coord: int
    new_tau_c: int
    new_tau_f: int


def _best_index(x: np.ndarray, hi: int, excl: int) -> int | None:
    """1-based argmax of x over 1..hi excluding excl; smallest index on ties."""
    if hi <= 0:
        return None
    seg = x[:hi]
    if 1 <= excl <= hi:
        if hi == 1:
            return None
        seg = seg.copy()
        seg[excl - 1] = -np.inf
    return int(np.argmax(seg)) + 1


def enumerate_candidates(x: np.ndarray, tau_c: int, tau_f: int) -> list[_Candidate]:
    """All sub-cases of the pointwise-max decomposition for one sample."""
    n = x.size
    out: list[_Candidate] = []

    # case 1: indicators untouched
    if tau_c and (tau_f == 0 or tau_c < tau_f):
        out.append(_Candidate("1a", FORM_POS, float(x[tau_c - 1]), 0, tau_c, tau_c, tau_f))
    elif tau_f and (tau_c == 0 or tau_f < tau_c):
        out.append(_Candidate("1b", FORM_NEG, float(x[tau_f - 1]), 0, tau_f, tau_c, tau_f))
    else:
        out.append(_Candidate("1c", FORM_ZERO, 0.0, 0, 0, tau_c, tau_f))

    # case 2a: counterparty default moved/created, lands before the firm's
    hi = tau_f - 1 if tau_f else n
    j = _best_index(x, hi, tau_c)
    if j is not None:
        out.append(_Candidate("2a", FORM_POS, float(x[j - 1]), 1 + (tau_c != 0), j, j, tau_f))

    # case 2b: counterparty indicator moved out of the way of a firm default
    if tau_f and (tau_c or tau_f < n):
        out.append(_Candidate("2b", FORM_NEG, float(x[tau_f - 1]), 1, tau_f,
                              0 if tau_c else n, tau_f))

    # case 3a: firm indicator moved/removed so the counterparty defaults first
    if tau_c and (tau_f or tau_c < n):
        out.append(_Candidate("3a", FORM_POS, float(x[tau_c - 1]), 1, tau_c,
                              tau_c, 0 if tau_f else n))

    # case 3b: firm default moved/created, lands before the counterparty's
    hi = tau_c - 1 if tau_c else n
    j = _best_index(x, hi, tau_f)
    if j is not None:
        out.append(_Candidate("3b", FORM_NEG, float(x[j - 1]), 1 + (tau_f != 0), j, tau_c, j))

    # case 4a: both moved, counterparty first (firm removed, or created late)
    hi = n if tau_f else n - 1
    j = _best_index(x, hi, tau_c)
    if j is not None:
        out.append(_Candidate("4a", FORM_POS, float(x[j - 1]), 2 + (tau_c != 0), j,
                              j, 0 if tau_f else n))

    # case 4b: both moved, firm first (counterparty removed, or created late)
    hi = n if tau_c else n - 1
    j = _best_index(x, hi, tau_f)
    if j is not None:
        out.append(_Candidate("4b", FORM_NEG, float(x[j - 1]), 2 + (tau_f != 0), j,
                              0 if tau_c else n, j))

    # pure removal to the no-default state: outside the four-case table, but
    # for a firm-first sample with a deeply negative payoff, wiping the firm
    # default at cost a*S3 beats every configuration that keeps a payoff
    if tau_f and not tau_c:
        out.append(_Candidate("3r", FORM_ZERO, 0.0, 1, 0, 0, 0))

    return out


def _candidate_value(cand: _Candidate, alpha: float, s3: float) -> float:
    if cand.form == FORM_POS:
        pay = max(0.25 / alpha + cand.xi, 0.0)
    elif cand.form == FORM_NEG:
        if cand.xi > 0.0:
            pay = 0.0
        elif cand.xi >= -0.5 / alpha:
            pay = -alpha * cand.xi**2
        else:
            pay = 0.25 / alpha + cand.xi
    else:
        pay = 0.0
    return pay - alpha * s3 * cand.k_moves


def _witness_move(cand: _Candidate, alpha: float) -> tuple[float, float, float]:
    """(exposure shift at coord, perturbed payoff, squared exposure cost)."""
    xi = cand.xi
    if cand.form == FORM_POS:
        if 0.25 / alpha + xi > 0.0:
            return 0.5 / alpha, xi + 0.5 / alpha, 0.25 / alpha**2
        return 0.0, 0.0, 0.0
    if cand.form == FORM_NEG:
        if xi > 0.0:
            return 0.0, 0.0, 0.0
        if xi >= -0.5 / alpha:
            return -xi, 0.0, xi**2
        return 0.5 / alpha, xi + 0.5 / alpha, 0.25 / alpha**2
    return 0.0, 0.0, 0.0


@dataclass(frozen=True)
class PsiWitness:
    """Value and attaining point of the inner supremum for one sample."""

    value: float
    case_label: str
    k_moves: int
    tau1_star: int          # payoff coordinate of the winning case (0 if none)
    u_star: np.ndarray
    new_tau_c: int
    new_tau_f: int
    payoff: float           # payoff of the perturbed point
    cost: float             # transport cost of the move


def psi_alpha_bcva(sample: BcvaSample, alpha: float, s3: float) -> PsiWitness:
    """Closed-form inner supremum with its witness. Requires alpha > 0."""
    if alpha <= 0:
        raise ValueError("alpha must be strictly positive")
    if s3 <= 0:
        raise ValueError("S3 must be strictly positive")
    cands = enumerate_candidates(sample.x, sample.tau_c, sample.tau_f)
    best = cands[0]
    best_val = _candidate_value(best, alpha, s3)
    for cand in cands[1:]:
        val = _candidate_value(cand, alpha, s3)
        if val > best_val:
            best, best_val = cand, val
    shift, pay, ucost = _witness_move(best, alpha)
    u_star = sample.x.copy()
    if best.coord:
        u_star[best.coord - 1] += shift
    cost = ucost + s3 * best.k_moves
    return PsiWitness(best_val, best.label, best.k_moves, best.coord, u_star,
                      best.new_tau_c, best.new_tau_f, pay, cost)


class CompiledBcvaProblem:
    """Per-sample candidate tables packed for vectorised F evaluation."""

    def __init__(self, samples: BcvaSampleSet):
        self.samples = samples
        self.candidates = [
            enumerate_candidates(samples.x[i], int(samples.tau_c[i]), int(samples.tau_f[i]))
            for i in range(len(samples))
        ]
        width = max(len(c) for c in self.candidates)
        n = len(samples)
        self.form = np.full((n, width), -1, dtype=np.int8)
        self.xi = np.zeros((n, width))
        self.k = np.zeros((n, width))
        for i, cands in enumerate(self.candidates):
            for j, cand in enumerate(cands):
                self.form[i, j] = cand.form
                self.xi[i, j] = cand.xi
                self.k[i, j] = cand.k_moves
        self._payoffs = samples.payoffs()

    def psi_values(self, alpha: float, s3: float) -> np.ndarray:
        inv4 = 0.25 / alpha
        half = 0.5 / alpha
        pos = np.maximum(inv4 + self.xi, 0.0)
        neg = np.where(
            self.xi > 0.0, 0.0,
            np.where(self.xi >= -half, -alpha * self.xi**2, inv4 + self.xi),
        )
        vals = np.where(self.form == FORM_POS, pos, np.where(self.form == FORM_NEG, neg, 0.0))
        vals = vals - alpha * s3 * self.k
        vals = np.where(self.form < 0, -np.inf, vals)
        return vals.max(axis=1)

    def baseline(self) -> float:
        return float(self._payoffs.mean())


def dual_objective_bcva(samples, alpha: float, delta: float, s3: float) -> float:
    """F(alpha) = alpha*delta + mean Psi_alpha over the sample set."""
    if alpha <= 0:
        raise ValueError("alpha must be strictly positive")
    problem = samples if isinstance(samples, CompiledBcvaProblem) else CompiledBcvaProblem(samples)
    return float(alpha * delta + problem.psi_values(alpha, s3).mean())


def minimize_dual_bcva(
    samples: BcvaSampleSet,
    delta: float,
    s3: float,
    alpha_min: float = ALPHA_MIN,
    alpha_max: float = ALPHA_MAX,
    rel_tol: float = 1e-8,
    kind: str = "bcva",
    sign: float = 1.0,
) -> DualSolution:
    """Solve the dual over the multiplier; boundary flag at the alpha cap."""
    if delta < 0:
        raise ValueError("delta must be non-negative")
    if s3 <= 0:
        raise ValueError("S3 must be strictly positive")
    problem = CompiledBcvaProblem(samples)

    def objective(alpha: float) -> float:
        return float(alpha * delta + problem.psi_values(alpha, s3).mean())

    alpha_star, value, boundary, trace = minimize_convex_on_log_grid(
        objective, alpha_min, alpha_max, rel_tol=rel_tol
    )
    witnesses = tuple(psi_alpha_bcva(s, alpha_star, s3) for s in samples)
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
        reported_value=sign * value,
    )


def robust_unilateral_cva(samples: BcvaSampleSet, delta: float, s3: float, **kwargs) -> DualSolution:
    """Bilateral machinery with the firm leg zeroed."""
    return minimize_dual_bcva(samples.cva_leg(), delta, s3, kind="ucva", **kwargs)


def robust_unilateral_dva(samples: BcvaSampleSet, delta: float, s3: float, **kwargs) -> DualSolution:
    """Bilateral machinery with the counterparty leg zeroed; reported negated."""
    return minimize_dual_bcva(samples.dva_leg(), delta, s3, kind="udva", sign=-1.0, **kwargs)


# ---------------------------------------------------------------------------
# Worst-case distribution recovery
# ---------------------------------------------------------------------------

def _menu_for_sample(sample: BcvaSample, alpha: float, s3: float) -> list[MenuItem]:
    items = [MenuItem(sample.payoff(), 0.0, (0, 0.0, sample.tau_c, sample.tau_f))]
    for cand in enumerate_candidates(sample.x, sample.tau_c, sample.tau_f):
        shift, pay, ucost = _witness_move(cand, alpha)
        items.append(
            MenuItem(pay, ucost + s3 * cand.k_moves,
                     (cand.coord, shift, cand.new_tau_c, cand.new_tau_f))
        )
    return items


def _first_to_default_coord(tau_c: int, tau_f: int) -> int:
    if tau_c and (tau_f == 0 or tau_c < tau_f):
        return tau_c
    if tau_f and (tau_c == 0 or tau_f < tau_c):
        return tau_f
    return 0


def recover_worst_case_bcva(
    solution: DualSolution,
    samples: BcvaSampleSet,
    delta: float | None = None,
    s3: float | None = None,
) -> WorstCaseDistribution:
    """Build the <= N+1 point worst case attaining the dual optimum.

    delta = 0 returns the reference measure itself (the limit case); boundary
    solutions are rejected because the supremum need not be attained there.
    """
    delta = solution.delta if delta is None else delta
    s3 = solution.s3 if s3 is None else s3
    n_samples = len(samples)
    if delta == 0.0:
        return WorstCaseDistribution(
            kind="bcva",
            weights=np.full(n_samples, 1.0 / n_samples),
            exposures=samples.x.copy(),
            tau_c=samples.tau_c.copy(),
            tau_f=samples.tau_f.copy(),
            survival_length=None,
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

    weights, rows, tcs, tfs, origins = [], [], [], [], []
    cost_acc = 0.0
    need_pad = result.leftover * n_samples  # unweighted squared move to absorb
    for i, sample in enumerate(samples):
        for item, frac in result.picks[i]:
            coord, shift, new_tc, new_tf = item.payload
            u = sample.x.copy()
            if coord:
                u[coord - 1] += shift
            extra = 0.0
            if need_pad > 0 and frac == 1.0:
                # absorb residual budget with a payoff-neutral exposure bump
                active = _first_to_default_coord(new_tc, new_tf)
                free = next((c for c in range(1, sample.n + 1) if c != active), None)
                if free is not None:
                    u[free - 1] += np.sqrt(need_pad)
                    extra = need_pad
                    need_pad = 0.0
            cost_acc += (frac / n_samples) * (item.cost + extra)
            weights.append(frac / n_samples)
            rows.append(u)
            tcs.append(new_tc)
            tfs.append(new_tf)
            origins.append(i)

    return WorstCaseDistribution(
        kind="bcva",
        weights=np.array(weights),
        exposures=np.stack(rows),
        tau_c=np.array(tcs, dtype=np.int64),
        tau_f=np.array(tfs, dtype=np.int64),
        survival_length=None,
        origin=np.array(origins, dtype=np.int64),
        split_origin=result.split_sample,
        transport_cost=cost_acc,
        delta=delta,
    )
