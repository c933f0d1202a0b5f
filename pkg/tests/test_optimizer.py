"""Tests for ESJD maximization, dimension sweeps, and drift diagnostics."""

import numpy as np
import pytest

from rwmscaling.engine import get_marginal_table, table_point
from rwmscaling.optimizer import (
    DimensionSweep,
    DriftReport,
    LocalMaximum,
    OptimizerError,
    ScalingOptimum,
    SweepRow,
    default_search_range,
    optimize,
    peak_drift_diagnostic,
    sweep_dimension,
)
from rwmscaling.targets import build_example_target, parse_target_spec


def test_optimize_gaussian_1d_matches_closed_form():
    t = build_example_target("gaussian", 1)
    opt = optimize(t, t, lam_lo=0.2, lam_hi=30.0, grid=128)
    assert opt.lambda_hat == pytest.approx(2.4264019, rel=2e-4)
    assert opt.ear_hat == pytest.approx(0.4388617, abs=2e-5)
    assert opt.n_local_maxima == 1


def test_optimize_laplace_1d_exact_answer():
    t = build_example_target("laplace", 1)
    opt = optimize(t, t, lam_lo=0.3, lam_hi=40.0, grid=128)
    assert opt.lambda_hat == pytest.approx(4.0, rel=2e-4)
    assert opt.ear_hat == pytest.approx(1.0 / 3.0, abs=2e-5)
    assert opt.esjd_hat == pytest.approx(256.0 / 216.0, rel=1e-5)


@pytest.mark.parametrize("spec,d", [
    ("gaussian", 5),
    ("exponential", 4),
    ("radial-gaussian", 6),
    ("radial-exponential", 5),
])
def test_unimodal_families_have_one_local_maximum(spec, d):
    t = parse_target_spec(spec, d)
    p = build_example_target("gaussian", d)
    opt = optimize(t, p, grid=192)
    assert opt.n_local_maxima == 1
    assert opt.local_maxima[0].lam == opt.lambda_hat


def test_boundary_argmax_raises():
    t = build_example_target("gaussian", 2)
    with pytest.raises(OptimizerError):
        optimize(t, t, lam_lo=0.001, lam_hi=0.05, grid=64)
    with pytest.raises(OptimizerError):
        optimize(t, t, lam_lo=50.0, lam_hi=500.0, grid=64)


def test_grid_doubling_is_stable():
    t = build_example_target("gaussian", 3)
    a = optimize(t, t, lam_lo=0.1, lam_hi=20.0, grid=128)
    b = optimize(t, t, lam_lo=0.1, lam_hi=20.0, grid=256)
    assert abs(a.lambda_hat / b.lambda_hat - 1.0) < 1e-3
    assert abs(a.esjd_hat / b.esjd_hat - 1.0) < 1e-6


def test_reported_optimum_is_an_interior_local_maximum():
    t = build_example_target("exponential", 3)
    opt = optimize(t, t, grid=192)
    table = get_marginal_table(t)
    for factor in (0.995, 1.005):
        nearby = table_point(table, t, opt.lambda_hat * factor)
        assert nearby.esjd <= opt.esjd_hat * (1.0 + 1e-9)


def test_mixture_d10_has_two_separated_maxima():
    t = parse_target_spec("mixture:p=1/d^2", 10)
    p = build_example_target("gaussian", 10)
    opt = optimize(t, p, lam_lo=0.05, lam_hi=40.0, grid=512)
    assert opt.n_local_maxima == 2
    lams = sorted(m.lam for m in opt.local_maxima)
    assert lams[0] == pytest.approx(0.78, rel=0.05)
    assert lams[1] == pytest.approx(7.56, rel=0.05)
    assert opt.lambda_hat == pytest.approx(lams[0], rel=1e-6)


def test_tie_break_prefers_smaller_scale():
    # With tie_rel = 1 every local maximum counts as tied for best, so the
    # canonical answer must be the smallest scale among them.
    t = parse_target_spec("mixture:p=1/d^2", 10)
    p = build_example_target("gaussian", 10)
    opt = optimize(t, p, lam_lo=0.05, lam_hi=40.0, grid=256, tie_rel=1.0)
    assert opt.n_local_maxima >= 2
    assert opt.lambda_hat == min(m.lam for m in opt.local_maxima)
    assert opt.canonical_rule == "smallest-lambda-among-argmax"


def test_optimize_rejects_bad_arguments():
    t = build_example_target("gaussian", 2)
    with pytest.raises(ValueError):
        optimize(t, t, lam_lo=1.0, lam_hi=0.5)
    with pytest.raises(ValueError):
        optimize(t, t, grid=32)
    with pytest.raises(ValueError):
        optimize(t, t, method="magic")


def test_default_search_range_centres_on_prediction():
    t = build_example_target("gaussian", 9)
    lo, hi = default_search_range(t, t)
    center = np.sqrt(lo * hi)
    assert center == pytest.approx(2.0 * 1.1906012483427703 / 3.0, rel=1e-12)


def test_sweep_reports_rows_and_reference_scale():
    sw = sweep_dimension("gaussian", "gaussian", [1, 2, 5], grid=128)
    assert sw.dims == (1, 2, 5)
    assert all(row.ok for row in sw.rows)
    assert sw.limit_mu_hat == pytest.approx(1.1906012483427703, abs=1e-9)
    assert sw.limit_aoa == pytest.approx(0.23381016133183664, abs=1e-9)
    for row in sw.rows:
        assert row.corollary_lambda is not None
        # the finite-d optimum approaches the asymptotic rule from above
        assert row.optimum.lambda_hat == pytest.approx(row.corollary_lambda,
                                                       rel=0.05)
    gaps = [abs(r.optimum.lambda_hat / r.corollary_lambda - 1.0)
            for r in sw.rows]
    assert gaps[-1] < gaps[0]


def test_sweep_validates_dims():
    with pytest.raises(ValueError):
        sweep_dimension("gaussian", "gaussian", [])
    with pytest.raises(ValueError):
        sweep_dimension("gaussian", "gaussian", [5, 5])
    with pytest.raises(ValueError):
        sweep_dimension("gaussian", "gaussian", [5, 2])


def _synthetic_sweep(mus, dims):
    rows = []
    for d, mu in zip(dims, mus):
        lam = 2.0 * mu / np.sqrt(d)
        opt = ScalingOptimum(lambda_hat=lam, ear_hat=0.2, esjd_hat=1.0,
                             local_maxima=(LocalMaximum(lam, 0.2, 1.0),))
        rows.append(SweepRow(d=d, ok=True, optimum=opt, corollary_lambda=None,
                             k_x=1.0, k_y=1.0))
    return DimensionSweep(target_spec="synthetic", proposal_spec="synthetic",
                          dims=tuple(dims), rows=tuple(rows),
                          limit_mu_hat=None, limit_aoa=None)


def test_drift_classification_bounded():
    sw = _synthetic_sweep([1.25, 1.21, 1.20, 1.19], [2, 5, 10, 30])
    rep = peak_drift_diagnostic(sw)
    assert isinstance(rep, DriftReport)
    assert rep.classification == "bounded-argmax"
    assert [d for d, _, _ in rep.per_dim] == [2, 5, 10, 30]


def test_drift_classification_drifting():
    sw = _synthetic_sweep([1.0, 2.2, 4.5, 9.0], [2, 5, 10, 30])
    assert peak_drift_diagnostic(sw).classification == "drifting-argmax"


def test_drift_classification_peak_swap():
    sw = _synthetic_sweep([1.2, 1.25, 7.8, 8.0], [2, 5, 10, 30])
    assert peak_drift_diagnostic(sw).classification == "peak-swap"


def test_drift_needs_two_successful_dims():
    sw = _synthetic_sweep([1.2], [4])
    with pytest.raises(OptimizerError):
        peak_drift_diagnostic(sw)
