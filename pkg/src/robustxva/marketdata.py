"""CSV readers for market-quote tables and swap portfolio files.

Table layouts:
  * tenor tables (swap rates, CDS spreads, funding spreads): header
    ``tenor_years,value`` with decimal values; ``NA`` rows are skipped
    (unquoted pillars extrapolate flat);
  * swaption vol surface: header ``expiry_years,<tenor>,...`` with one row
    per expiry, decimal normal vols;
  * portfolio: header ``issued,notional,maturity_years,direction,coupon,
    frequency`` matching the study's portfolio tables; notionals are scaled
    by a configurable unit multiplier.
"""

from __future__ import annotations

import csv
from pathlib import Path

from .errors import DataError
from .swaps import SwapSpec

_DIRECTIONS = {
    "rec": True, "receive": True, "r": True,
    "pay": False, "p": False,
}

_FREQUENCIES = {"annual": 1, "semiannual": 2, "quarterly": 4, "monthly": 12}


def _open_rows(path: Path):
    if not path.exists():
        raise DataError(f"data file not found: {path}")
    with path.open(newline="") as fh:
        rows = list(csv.reader(fh))
    rows = [r for r in rows if r and not r[0].lstrip().startswith("#")]
    if len(rows) < 2:
        raise DataError(f"no data rows in {path}")
    return rows


def _parse_float(text: str, path: Path, field: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise DataError(f"bad value for {field} in {path}: {text!r}") from None


def read_tenor_table(path) -> list[tuple[float, float]]:
    """(tenor_years, value) rows, ascending; NA values dropped."""
    path = Path(path)
    rows = _open_rows(path)
    out = []
    for row in rows[1:]:
        if len(row) < 2:
            raise DataError(f"short row in {path}: {row!r}")
        if row[1].strip().upper() in {"NA", "N/A", ""}:
            continue
        out.append((_parse_float(row[0], path, "tenor"), _parse_float(row[1], path, "value")))
    if not out:
        raise DataError(f"all rows NA in {path}")
    if any(b[0] <= a[0] for a, b in zip(out, out[1:])):
        raise DataError(f"tenors not strictly increasing in {path}")
    return out


def read_vol_surface(path) -> dict[tuple[float, float], float]:
    """{(expiry_years, tenor_years): normal vol} parsed from the matrix."""
    path = Path(path)
    rows = _open_rows(path)
    header = rows[0]
    tenors = [_parse_float(t, path, "tenor header") for t in header[1:]]
    surface: dict[tuple[float, float], float] = {}
    for row in rows[1:]:
        expiry = _parse_float(row[0], path, "expiry")
        if len(row) != len(header):
            raise DataError(f"ragged surface row in {path}: {row!r}")
        for tenor, cell in zip(tenors, row[1:]):
            if cell.strip().upper() in {"NA", "N/A", ""}:
                continue
            surface[(expiry, tenor)] = _parse_float(cell, path, "vol")
    if not surface:
        raise DataError(f"empty vol surface in {path}")
    return surface


def read_portfolio(path, notional_unit: float = 1.0) -> list[SwapSpec]:
    """Swap list from the portfolio table; notional scaled by the unit."""
    path = Path(path)
    rows = _open_rows(path)
    header = [h.strip().lower() for h in rows[0]]
    required = ["issued", "notional", "maturity_years", "direction", "coupon", "frequency"]
    try:
        cols = {name: header.index(name) for name in required}
    except ValueError as exc:
        raise DataError(f"portfolio {path} missing column: {exc}") from None
    swaps = []
    for row in rows[1:]:
        direction = row[cols["direction"]].strip().lower()
        if direction not in _DIRECTIONS:
            raise DataError(f"bad direction in {path}: {direction!r}")
        freq_text = row[cols["frequency"]].strip().lower()
        frequency = _FREQUENCIES.get(freq_text)
        if frequency is None:
            try:
                frequency = int(freq_text)
            except ValueError:
                raise DataError(f"bad frequency in {path}: {freq_text!r}") from None
        swaps.append(
            SwapSpec(
                notional=_parse_float(row[cols["notional"]], path, "notional") * notional_unit,
                maturity=_parse_float(row[cols["maturity_years"]], path, "maturity"),
                fixed_rate=_parse_float(row[cols["coupon"]], path, "coupon"),
                receive_fixed=_DIRECTIONS[direction],
                frequency=frequency,
            )
        )
    if not swaps:
        raise DataError(f"empty portfolio in {path}")
    return swaps
