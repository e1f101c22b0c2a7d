"""Exposure profile metrics: EE, PFE, EffEE and their time averages.

PFE uses the lower-quantile (inf) convention: the smallest x with
quantile_level <= F(x). Time averages integrate the discrete profiles by the
trapezoid rule over [0, T]. The same formulas serve the CVA side (positive
exposures), the DVA side (negative exposures) and the funding legs.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .grids import DateGrid


@dataclass(frozen=True)
class ExposureProfiles:
    times: np.ndarray
    expected: np.ndarray       # EE(t), cross-path mean
    pfe: np.ndarray            # lower quantile per date
    effective: np.ndarray      # running max of EE
    quantile_level: float
    epe: float                 # (1/T) integral of EE
    effective_epe: float       # (1/T) integral of EffEE
    max_pfe: float

    @property
    def integrated_pfe(self) -> float:
        """Sum of per-date PFE values (comparable to summed per-period legs)."""
        return float(self.pfe[1:].sum())


def lower_quantile(values: np.ndarray, level: float, axis: int = 0) -> np.ndarray:
    """inf{x : level <= F(x)} per slice, the order-statistic at ceil(qN)."""
    if not 0.0 < level < 1.0:
        raise ValueError("quantile level must be in (0, 1)")
    return np.quantile(values, level, axis=axis, method="inverted_cdf")


def exposure_profiles(values: np.ndarray, grid: DateGrid, quantile_level: float = 0.95) -> ExposureProfiles:
    """Profile metrics for one exposure matrix (n_paths, n+1)."""
    values = np.asarray(values, dtype=float)
    if values.ndim != 2 or values.shape[0] == 0:
        raise ValueError("need a non-empty n_paths x (n+1) exposure matrix")
    if values.shape[1] != grid.times.size:
        raise ValueError("exposure matrix does not match the grid")
    times = grid.times
    ee = values.mean(axis=0)
    pfe = lower_quantile(values, quantile_level, axis=0)
    eff = np.maximum.accumulate(ee)
    horizon = grid.horizon
    epe = float(np.trapezoid(ee, times) / horizon)
    eff_epe = float(np.trapezoid(eff, times) / horizon)
    return ExposureProfiles(
        times=times,
        expected=ee,
        pfe=pfe,
        effective=eff,
        quantile_level=quantile_level,
        epe=epe,
        effective_epe=eff_epe,
        max_pfe=float(pfe.max()),
    )


def write_profiles_csv(profiles: ExposureProfiles, path) -> None:
    """One row per date (date, EE, PFE, EffEE); scalars in a trailer record."""
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["date", "ee", "pfe", "eff_ee"])
        for t, e, p, f in zip(profiles.times, profiles.expected, profiles.pfe, profiles.effective):
            writer.writerow([f"{t:.12g}", f"{e:.12g}", f"{p:.12g}", f"{f:.12g}"])
        writer.writerow([
            "TOTAL",
            f"{profiles.epe:.12g}",
            f"{profiles.max_pfe:.12g}",
            f"{profiles.effective_epe:.12g}",
        ])
