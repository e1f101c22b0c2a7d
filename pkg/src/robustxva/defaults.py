"""Default-time sampling on the observation grid.

Default times are drawn by inverse transform from the survival curve and
snapped to the first grid date >= tau. Grid index 0 encodes survival beyond
the horizon. Counterparty and firm are drawn independently; on the discrete
grid simultaneous defaults have positive probability, so ties are resolved
by redrawing the firm's uniform (both marginals are preserved).
"""

from __future__ import annotations

import numpy as np

from .curves import HazardCurve
from .grids import DateGrid


def default_index_probabilities(hazard: HazardCurve, grid: DateGrid) -> np.ndarray:
    """P(index = k) for k = 0..n; index k>0 means tau in (t_{k-1}, t_k]."""
    surv = hazard.survival(grid.times)
    probs = np.empty(grid.n + 1)
    probs[0] = surv[-1]
    probs[1:] = surv[:-1] - surv[1:]
    return probs


def _indices_from_uniforms(u: np.ndarray, surv: np.ndarray) -> np.ndarray:
    # tau <= t_k  iff  S(t_k) <= 1-u; searchsorted over decreasing S via negation
    v = 1.0 - u
    idx = np.searchsorted(-surv[1:], -v, side="left") + 1
    idx[idx > surv.size - 1] = 0
    return idx


def sample_default_times(hazard: HazardCurve, grid: DateGrid, n_paths: int, seed) -> np.ndarray:
    """Per-path default grid index (0 = no default by the horizon)."""
    if n_paths < 1:
        raise ValueError("n_paths must be >= 1")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    surv = hazard.survival(grid.times)
    return _indices_from_uniforms(rng.random(n_paths), surv)


def sample_joint_default_times(
    cpty_hazard: HazardCurve,
    firm_hazard: HazardCurve,
    grid: DateGrid,
    n_paths: int,
    seed,
    max_redraws: int = 64,
) -> tuple[np.ndarray, np.ndarray]:
    """Independent counterparty/firm indices with grid ties resampled away."""
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    surv_c = cpty_hazard.survival(grid.times)
    surv_f = firm_hazard.survival(grid.times)
    idx_c = _indices_from_uniforms(rng.random(n_paths), surv_c)
    idx_f = _indices_from_uniforms(rng.random(n_paths), surv_f)
    for _ in range(max_redraws):
        tied = (idx_c != 0) & (idx_c == idx_f)
        if not np.any(tied):
            return idx_c, idx_f
        idx_f[tied] = _indices_from_uniforms(rng.random(int(tied.sum())), surv_f)
    raise RuntimeError("could not clear simultaneous-default ties; grid too coarse")
