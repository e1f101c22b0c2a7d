import numpy as np
import pytest

from robustxva.oracle import (
    brute_psi_bcva,
    brute_psi_fva,
    grid_dual_scan,
    grid_maximize,
    scalar_subproblem,
    sup_negative_part,
    sup_positive_part,
)
from robustxva.samples import BcvaSample, BcvaSampleSet, FvaSample, FvaSampleSet


def test_row1_value():
    assert scalar_subproblem("unconstrained_linear", 0.5, y_norm_sq=1.0) == pytest.approx(0.5)


def test_row3_value():
    assert scalar_subproblem("positive_part", 1.0, xy=-1.0) == 0.0
    assert scalar_subproblem("positive_part", 1.0, xy=0.5) == pytest.approx(0.75)


def test_unknown_kind_rejected():
    with pytest.raises(ValueError, match="unknown"):
        scalar_subproblem("nope", 1.0)


@pytest.mark.parametrize("alpha", [0.05, 0.3, 1.0, 4.0])
@pytest.mark.parametrize("xval", [-3.0, -0.4, -0.05, 0.0, 0.2, 2.5])
def test_rows_match_dense_grid(alpha, xval):
    width = 10.0 / alpha * max(1.0, abs(xval))
    # row 1 (|y| = 1)
    got = scalar_subproblem("unconstrained_linear", alpha, y_norm_sq=1.0)
    ref = grid_maximize(lambda w: w - alpha * w**2, -width, width)
    assert got == pytest.approx(ref, abs=1e-6)
    # row 2: capped move; the grid upper end sits exactly on the cap
    got = scalar_subproblem("capped_linear", alpha, cap=xval)
    ref = grid_maximize(lambda w: w - alpha * w**2, -width, min(xval, width))
    assert got == pytest.approx(ref, abs=1e-6)
    # row 3: positive part
    got = scalar_subproblem("positive_part", alpha, xy=xval)
    ref = grid_maximize(lambda w: np.maximum(w + xval, 0.0) - alpha * w**2, -width, width)
    assert got == pytest.approx(ref, abs=1e-6)
    # row 4: negative part
    got = scalar_subproblem("negative_part", alpha, xy=xval)
    ref = grid_maximize(lambda w: np.minimum(w + xval, 0.0) - alpha * w**2, -width, width)
    assert got == pytest.approx(ref, abs=1e-6)
    # row 5: shifted negative part collapses onto row 4 at x_tau1
    got = scalar_subproblem("negative_part_shifted", alpha, x_tau1=xval, x_tau2=1.7)
    assert got == pytest.approx(scalar_subproblem("negative_part", alpha, xy=xval), abs=1e-12)


def test_brute_psi_bcva_identity_sample():
    # unperturbed winner: positive exposure at its own default date
    s = BcvaSample(np.array([0.5, 0.0]), 1, 0)
    val = brute_psi_bcva(s, alpha=1.0, s3=10.0)
    assert val == pytest.approx(sup_positive_part(0.5, 1.0))


def test_brute_psi_bcva_large_alpha_is_payoff():
    s = BcvaSample(np.array([0.5, -1.0, 2.0]), 0, 2)
    val = brute_psi_bcva(s, alpha=1e6, s3=1.0)
    assert val == pytest.approx(s.payoff(), abs=1e-5)


def test_brute_psi_fva_block_identity():
    s = FvaSample(np.array([1.0, -2.0, 0.5]), 2)
    alpha = 3.0
    val = brute_psi_fva(s, alpha, s3=1e9)
    # huge S3 freezes the block: payoff + m/(4 alpha)
    assert val == pytest.approx(s.payoff() + 2 / (4 * alpha))


def test_brute_psi_fva_zero_sample():
    s = FvaSample(np.array([0.0, 0.0]), 0)
    assert brute_psi_fva(s, alpha=1.0, s3=10.0) == pytest.approx(0.0)


def test_enumeration_cap():
    s = BcvaSample(np.zeros(7), 0, 0)
    with pytest.raises(ValueError, match="capped"):
        brute_psi_bcva(s, 1.0, 1.0)


def test_grid_scan_delta_zero_trace_monotone():
    sset = BcvaSampleSet(np.array([[0.5, -0.2], [1.0, 0.3]]), np.array([1, 2]), np.array([0, 0]))
    alphas, f_vals = grid_dual_scan(sset, 0.0, 1.0, "bcva", num=400, return_trace=True)
    assert np.all(np.diff(f_vals) <= 1e-12)


def test_grid_scan_trace_is_convex_in_alpha():
    rng = np.random.default_rng(0)
    z = rng.normal(size=(3, 3))
    sset = FvaSampleSet(z, np.array([1, 3, 0]))
    alphas, f_vals = grid_dual_scan(sset, 0.4, 0.7, "fva", num=2000, return_trace=True)
    # convex in alpha: no strict interior local max along the trace
    interior = f_vals[1:-1]
    assert not np.any((interior > f_vals[:-2] + 1e-9) & (interior > f_vals[2:] + 1e-9))
