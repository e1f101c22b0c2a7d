"""Worst-case distribution assembly from per-sample inner-supremum witnesses.

An empirical reference measure on N points admits a worst case supported on
at most N+1 points: each sample either stays, moves to a witness of its
inner supremum at alpha*, or (for exactly one sample) splits its 1/N mass
between two points so the transport budget delta is met exactly. Samples are
processed in descending order of payoff gain per unit transport cost; when
the plain pass leaves budget unused (a kink in F at alpha*), selections are
upgraded towards costlier near-optimal witnesses at the dual price.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np


@dataclass(frozen=True)
class MenuItem:
    """One admissible perturbed point for a sample: payoff, move cost, move."""

    payoff: float
    cost: float
    payload: object


@dataclass
class GreedyResult:
    picks: list            # per sample: list of (MenuItem, mass fraction), fractions sum to 1
    total_cost: float      # weighted transport cost sum_i (1/N) sum_m frac * cost
    leftover: float        # delta - total_cost (>= 0 when the budget could not be filled)
    split_sample: int | None


def _best_item(menu: Sequence[MenuItem], alpha: float) -> int:
    best, best_key = 0, None
    for idx, item in enumerate(menu):
        key = (item.payoff - alpha * item.cost, -item.cost)
        if best_key is None or key > best_key:
            best, best_key = idx, key
    return best


def greedy_budgeted_moves(
    menus: Sequence[Sequence[MenuItem]],
    alpha: float,
    delta: float,
) -> GreedyResult:
    """Allocate the transport budget across samples, splitting at most one.

    menus[i][0] must be the stay-put point (cost 0, the sample's own payoff).
    """
    n = len(menus)
    budget = n * delta
    selected = [_best_item(menu, alpha) for menu in menus]
    picks: list[list[tuple[MenuItem, float]]] = [[] for _ in range(n)]
    split_sample = None

    order = sorted(
        (i for i in range(n) if menus[i][selected[i]].cost > 0),
        key=lambda i: (-(menus[i][selected[i]].payoff - menus[i][0].payoff)
                       / menus[i][selected[i]].cost, i),
    )
    used = 0.0
    exhausted = False
    for i in order:
        item = menus[i][selected[i]]
        if exhausted:
            selected[i] = 0
            continue
        if used + item.cost <= budget * (1 + 1e-12) + 1e-300:
            used += item.cost
        else:
            theta = (budget - used) / item.cost
            if theta > 1e-15:
                picks[i] = [(item, theta), (menus[i][0], 1.0 - theta)]
                split_sample = i
                used = budget
            selected[i] = 0 if theta <= 1e-15 else -1  # -1: already picked
            exhausted = True

    # upgrade pass: budget left over means the cheapest witnesses were not
    # expensive enough; swap towards costlier near-optimal points
    if not exhausted and budget - used > 1e-14 * max(budget, 1.0):
        while budget - used > 1e-14 * max(budget, 1.0):
            best = None
            for i in range(n):
                if selected[i] == -1 or picks[i]:
                    continue
                cur = menus[i][selected[i]]
                for idx, item in enumerate(menus[i]):
                    dc = item.cost - cur.cost
                    df = item.payoff - cur.payoff
                    if dc <= 0 or df <= 0:
                        continue
                    ratio = df / dc
                    if best is None or ratio > best[0]:
                        best = (ratio, i, idx, dc)
            if best is None:
                break
            _, i, idx, dc = best
            cur = menus[i][selected[i]]
            if used + dc <= budget:
                selected[i] = idx
                used += dc
            else:
                theta = (budget - used) / dc
                picks[i] = [(menus[i][idx], theta), (cur, 1.0 - theta)]
                split_sample = i
                selected[i] = -1
                used = budget
                break

    for i in range(n):
        if not picks[i]:
            picks[i] = [(menus[i][selected[i]], 1.0)]
    total_cost = sum(frac * item.cost for row in picks for item, frac in row) / n
    return GreedyResult(picks, total_cost, max(delta - total_cost, 0.0), split_sample)


@dataclass(frozen=True)
class WorstCaseDistribution:
    """Weighted perturbed samples realising the robust supremum within budget.

    For kind "bcva" the indicator columns are (tau_c, tau_f); for kind "fva"
    survival_length is set instead. `origin` maps each support point back to
    the reference sample it perturbs.
    """

    kind: str
    weights: np.ndarray
    exposures: np.ndarray
    tau_c: np.ndarray | None
    tau_f: np.ndarray | None
    survival_length: np.ndarray | None
    origin: np.ndarray
    split_origin: int | None
    transport_cost: float
    delta: float

    @property
    def n_points(self) -> int:
        return self.weights.size

    def expected_payoff(self) -> float:
        if self.kind == "bcva":
            rows = np.arange(self.n_points)
            pos = np.where(self.tau_c > 0,
                           np.maximum(self.exposures[rows, self.tau_c - 1], 0.0), 0.0)
            neg = np.where(self.tau_f > 0,
                           np.minimum(self.exposures[rows, self.tau_f - 1], 0.0), 0.0)
            return float(self.weights @ (pos + neg))
        prefix = np.concatenate(
            (np.zeros((self.n_points, 1)), np.cumsum(self.exposures, axis=1)), axis=1
        )
        vals = prefix[np.arange(self.n_points), self.survival_length]
        return float(self.weights @ vals)

    def transport_cost_to(self, reference, s3: float) -> float:
        """Recompute E[c] against the reference set along the built coupling."""
        from .samples import cost_bcva_components, indicator_move_cost

        total = 0.0
        for e in range(self.n_points):
            ref = reference[int(self.origin[e])]
            if self.kind == "bcva":
                total += self.weights[e] * cost_bcva_components(
                    self.exposures[e], int(self.tau_c[e]), int(self.tau_f[e]),
                    ref.x, ref.tau_c, ref.tau_f, s3,
                )
            else:
                du = self.exposures[e] - ref.z
                total += self.weights[e] * (
                    s3 * abs(int(self.survival_length[e]) - ref.survival_length) + du @ du
                )
        return total

    def to_rows(self):
        """CSV-ready rows: weight, exposure values, indicator column(s)."""
        for e in range(self.n_points):
            head = [float(self.weights[e])] + [float(v) for v in self.exposures[e]]
            if self.kind == "bcva":
                yield head + [int(self.tau_c[e]), int(self.tau_f[e])]
            else:
                yield head + [int(self.survival_length[e])]
