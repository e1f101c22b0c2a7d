import numpy as np
import pytest

from robustxva.grids import DateGrid
from robustxva.metrics import exposure_profiles, lower_quantile, write_profiles_csv


def test_constant_exposure_all_metrics_equal():
    grid = DateGrid.regular(2.0, 2)
    values = np.full((50, 5), 3.0)
    prof = exposure_profiles(values, grid)
    assert np.allclose(prof.expected, 3.0)
    assert np.allclose(prof.pfe, 3.0)
    assert np.allclose(prof.effective, 3.0)
    assert prof.epe == pytest.approx(3.0)
    assert prof.effective_epe == pytest.approx(3.0)
    assert prof.max_pfe == pytest.approx(3.0)


def test_pfe_lower_quantile_convention():
    # four paths {0,1,2,3} at each date: the 95% lower quantile is 3
    grid = DateGrid(np.array([0.0, 1.0]))
    values = np.array([[0.0, 0.0], [1.0, 1.0], [2.0, 2.0], [3.0, 3.0]])
    prof = exposure_profiles(values, grid, quantile_level=0.95)
    assert prof.pfe[1] == pytest.approx(3.0)
    # and the 50% quantile picks the second order statistic
    assert lower_quantile(values[:, 1], 0.5) == pytest.approx(1.0)


def test_effective_ee_is_running_max():
    grid = DateGrid(np.array([0.0, 1.0, 2.0, 3.0]))
    values = np.array([[5.0, 3.0, 4.0, 1.0]])
    prof = exposure_profiles(values, grid)
    assert np.allclose(prof.effective, [5.0, 5.0, 5.0, 5.0])
    decreasing = np.array([[5.0, 4.0, 3.0, 2.0]])
    prof2 = exposure_profiles(decreasing, grid)
    assert np.allclose(prof2.effective, 5.0)


def test_effective_dominates_and_averages_order():
    rng = np.random.default_rng(0)
    grid = DateGrid.regular(5.0, 4)
    values = np.maximum(rng.normal(size=(200, 21)), 0.0)
    prof = exposure_profiles(values, grid)
    assert np.all(prof.effective >= prof.expected - 1e-12)
    assert np.all(np.diff(prof.effective) >= -1e-12)
    assert prof.effective_epe >= prof.epe


def test_pfe_monotone_in_quantile_level():
    rng = np.random.default_rng(1)
    grid = DateGrid.regular(1.0, 4)
    values = rng.normal(size=(500, 5))
    levels = [0.5, 0.8, 0.9, 0.95, 0.99]
    pfes = [exposure_profiles(values, grid, q).pfe for q in levels]
    for lo, hi in zip(pfes, pfes[1:]):
        assert np.all(hi >= lo - 1e-12)


def test_negative_leg_profiles():
    grid = DateGrid(np.array([0.0, 1.0]))
    values = np.array([[-1.0, -3.0], [-2.0, 0.0]])
    prof = exposure_profiles(values, grid, quantile_level=0.95)
    assert prof.expected[1] == pytest.approx(-1.5)
    assert prof.pfe[1] == pytest.approx(0.0)  # closest-to-zero order statistic


def test_quantile_level_validation():
    with pytest.raises(ValueError):
        lower_quantile(np.array([1.0, 2.0]), 1.5)


def test_profiles_csv_trailer(tmp_path):
    grid = DateGrid(np.array([0.0, 0.5, 1.0]))
    values = np.array([[1.0, 2.0, 3.0], [1.0, 0.0, 1.0]])
    prof = exposure_profiles(values, grid)
    p = tmp_path / "prof.csv"
    write_profiles_csv(prof, p)
    lines = p.read_text().strip().splitlines()
    assert lines[0] == "date,ee,pfe,eff_ee"
    assert len(lines) == 2 + grid.times.size  # header + rows + trailer
    assert lines[-1].startswith("TOTAL,")
