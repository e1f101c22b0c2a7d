"""Assembly of BCVA and FVA sample sets from exposure cubes and default draws.

BCVA samples carry the recovery-adjusted discounted exposure on t_1..t_n and
first-to-default filtered indicator indices. FVA samples accrue per-period
funding spreads on the positive/negative exposure split and carry the joint
survival block (strict survival: y[k] = 1 requires both alive beyond t_k).
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .curves import FundingCurve
from .errors import DataError
from .samples import BcvaSampleSet, FvaSampleSet
from .swaps import ExposureCube


@dataclass(frozen=True)
class RecoveryConfig:
    counterparty: float = 0.4
    firm: float = 0.4

    def __post_init__(self):
        for r in (self.counterparty, self.firm):
            if not 0.0 <= r < 1.0:
                raise ValueError("recovery rates must lie in [0, 1)")


def build_bcva_samples(
    cube: ExposureCube,
    cpty_default_idx: np.ndarray,
    firm_default_idx: np.ndarray,
    recoveries: RecoveryConfig,
) -> BcvaSampleSet:
    """Recovery-adjust the exposure cube and apply the first-to-default filter."""
    n = cube.grid.n
    cpty = np.asarray(cpty_default_idx, dtype=np.int64)
    firm = np.asarray(firm_default_idx, dtype=np.int64)
    if cpty.shape != (cube.n_paths,) or firm.shape != (cube.n_paths,):
        raise ValueError("default index arrays must have one entry per path")
    if np.any((cpty < 0) | (cpty > n) | (firm < 0) | (firm > n)):
        raise ValueError("default indices outside the grid")
    if np.any((cpty != 0) & (cpty == firm)):
        raise ValueError("simultaneous defaults must be resolved upstream")

    x = (1.0 - recoveries.counterparty) * cube.positive[:, 1:] \
        + (1.0 - recoveries.firm) * cube.negative[:, 1:]
    cpty_first = (cpty > 0) & ((firm == 0) | (cpty < firm))
    firm_first = (firm > 0) & ((cpty == 0) | (firm < cpty))
    tau_c = np.where(cpty_first, cpty, 0)
    tau_f = np.where(firm_first, firm, 0)
    return BcvaSampleSet(x, tau_c, tau_f)


def joint_survival_lengths(
    cpty_default_idx: np.ndarray, firm_default_idx: np.ndarray, n: int
) -> np.ndarray:
    """Leading count of dates t_k with both parties alive strictly beyond t_k."""
    cpty = np.where(cpty_default_idx == 0, n + 1, cpty_default_idx)
    firm = np.where(firm_default_idx == 0, n + 1, firm_default_idx)
    first = np.minimum(cpty, firm)
    return np.where(first > n, n, first - 1).astype(np.int64)


def build_fva_samples(
    cube: ExposureCube,
    cpty_default_idx: np.ndarray,
    firm_default_idx: np.ndarray,
    funding: FundingCurve,
    spread_shocks: np.ndarray | None = None,
) -> FvaSampleSet:
    """Per-period funding exposures against the joint survival block.

    z[k] = f_c(t_{k-1},t_k) X+(t_k) + f_b(t_{k-1},t_k) X-(t_k); optional
    multiplicative spread shocks (n_paths, n) scale both legs pathwise.
    """
    grid = cube.grid
    n = grid.n
    f_cost = funding.period_cost(grid)[None, :]
    f_benefit = funding.period_benefit(grid)[None, :]
    if spread_shocks is not None:
        shocks = np.asarray(spread_shocks, dtype=float)
        if shocks.shape != (cube.n_paths, n):
            raise ValueError("spread shocks must be n_paths x n")
        f_cost = f_cost * shocks
        f_benefit = f_benefit * shocks
    z = f_cost * cube.positive[:, 1:] + f_benefit * cube.negative[:, 1:]
    lengths = joint_survival_lengths(
        np.asarray(cpty_default_idx, dtype=np.int64),
        np.asarray(firm_default_idx, dtype=np.int64),
        n,
    )
    return FvaSampleSet(z, lengths)


# ---------------------------------------------------------------------------
# Sample dumps for reuse across robust runs
# ---------------------------------------------------------------------------

def save_bcva_samples(samples: BcvaSampleSet, path) -> None:
    """CSV rows: path id, n exposure values, tau_c, tau_f."""
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        header = ["path"] + [f"x{k}" for k in range(1, samples.n + 1)] + ["tau_c", "tau_f"]
        writer.writerow(header)
        for i in range(len(samples)):
            row = [i] + [f"{v:.12g}" for v in samples.x[i]]
            row += [int(samples.tau_c[i]), int(samples.tau_f[i])]
            writer.writerow(row)


def load_bcva_samples(path) -> BcvaSampleSet:
    path = Path(path)
    if not path.exists():
        raise DataError(f"sample dump not found: {path}")
    with path.open() as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if not header or header[-2:] != ["tau_c", "tau_f"]:
            raise DataError(f"not a BCVA sample dump: {path}")
        xs, tcs, tfs = [], [], []
        for row in reader:
            xs.append([float(v) for v in row[1:-2]])
            tcs.append(int(row[-2]))
            tfs.append(int(row[-1]))
    if not xs:
        raise DataError(f"empty sample dump: {path}")
    return BcvaSampleSet(np.array(xs), np.array(tcs), np.array(tfs))


def save_fva_samples(samples: FvaSampleSet, path) -> None:
    """CSV rows: path id, n funding exposure values, survival block length."""
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        header = ["path"] + [f"z{k}" for k in range(1, samples.n + 1)] + ["survival_length"]
        writer.writerow(header)
        for i in range(len(samples)):
            row = [i] + [f"{v:.12g}" for v in samples.z[i]]
            row.append(int(samples.survival_length[i]))
            writer.writerow(row)


def load_fva_samples(path) -> FvaSampleSet:
    path = Path(path)
    if not path.exists():
        raise DataError(f"sample dump not found: {path}")
    with path.open() as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if not header or header[-1] != "survival_length":
            raise DataError(f"not an FVA sample dump: {path}")
        zs, lens = [], []
        for row in reader:
            zs.append([float(v) for v in row[1:-1]])
            lens.append(int(row[-1]))
    if not zs:
        raise DataError(f"empty sample dump: {path}")
    return FvaSampleSet(np.array(zs), np.array(lens))
