"""Exponent fitting, grid helpers, table specs, and convergence reports."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rabi_quench import (
    DisorderChannel,
    DisorderModel,
    InsufficientData,
    InvalidSpec,
    MonteCarlo,
    NonPositiveEnergy,
    Quadrature,
    QuenchSpec,
    ScalingFit,
    TableSpec,
    convergence_report,
    default_table_spec,
    ensemble_residual_energy,
    fit_power_law,
    log_grid,
    reproduce_table,
)


# ---------------------------------------------------------------------------
# fitting
# ---------------------------------------------------------------------------

def test_exact_third_root_law():
    xs = np.logspace(3, 4, 8)
    fit = fit_power_law([(x, 2.0 * x ** (-1.0 / 3.0)) for x in xs], (1e3, 1e4))
    assert abs(fit.nu + 1.0 / 3.0) <= 1e-12
    assert fit.r_squared >= 1.0 - 1e-12
    assert fit.stderr_nu <= 1e-12
    assert fit.n_points == 8


def test_exact_inverse_square_law():
    xs = np.logspace(2, 4, 12)
    fit = fit_power_law([(x, 0.7 * x ** -2.0) for x in xs], (1e2, 1e4))
    assert abs(fit.nu + 2.0) <= 1e-12


@settings(max_examples=60)
@given(
    p=st.floats(-3.0, -0.05),
    c=st.floats(1e-6, 1e3),
)
def test_exact_power_law_recovered(p, c):
    xs = np.logspace(2, 4, 9)
    fit = fit_power_law([(x, c * x ** p) for x in xs], (1e2, 1e4))
    assert abs(fit.nu - p) <= 1e-9
    assert abs(fit.log_intercept - np.log(c)) <= 1e-7


@settings(max_examples=40)
@given(scale=st.floats(1e-8, 1e8))
def test_fit_scale_invariance(scale):
    xs = np.logspace(3, 4, 8)
    ys = 0.3 * xs ** -0.71 * (1.0 + 0.01 * np.sin(xs))
    base = fit_power_law(list(zip(xs, ys)), (1e3, 1e4))
    scaled = fit_power_law(list(zip(xs, scale * ys)), (1e3, 1e4))
    assert abs(base.nu - scaled.nu) <= 1e-9
    assert abs(scaled.log_intercept - base.log_intercept - np.log(scale)) <= 1e-7


def test_window_restriction():
    xs = np.logspace(2, 5, 13)
    pts = [(x, x ** -1.0) for x in xs]
    fit = fit_power_law(pts, (1e3, 1e4))
    assert fit.n_points == 5  # 1e3..1e4 inclusive at 4 per decade
    assert fit.window == (1e3, 1e4)


def test_window_endpoints_included():
    # grid values that sit exactly on the window edges must not be lost to
    # floating-point jitter
    xs = log_grid(1e3, 1e4, 8)
    pts = [(x, x ** -0.5) for x in xs]
    fit = fit_power_law(pts, (1e3, 1e4))
    assert fit.n_points == len(xs)


def test_insufficient_data():
    with pytest.raises(InsufficientData):
        fit_power_law([(1e3, 1.0), (2e3, 0.5)], (1e3, 1e4))
    with pytest.raises(InsufficientData):
        fit_power_law([(10.0, 1.0), (20.0, 0.5), (40.0, 0.2)], (1e3, 1e4))


def test_non_positive_energy():
    pts = [(1e3, 1.0), (2e3, 0.0), (4e3, 0.5)]
    with pytest.raises(NonPositiveEnergy):
        fit_power_law(pts, (1e3, 1e4))


def test_scaling_fit_invariants():
    with pytest.raises(InvalidSpec):
        ScalingFit(nu=-1.0, log_intercept=0.0, stderr_nu=0.0,
                   window=(1e4, 1e3), r_squared=1.0, n_points=5)
    with pytest.raises(InvalidSpec):
        ScalingFit(nu=-1.0, log_intercept=0.0, stderr_nu=0.0,
                   window=(1e3, 1e4), r_squared=1.5, n_points=5)
    with pytest.raises(InvalidSpec):
        ScalingFit(nu=-1.0, log_intercept=0.0, stderr_nu=0.0,
                   window=(1e3, 1e4), r_squared=1.0, n_points=2)


# ---------------------------------------------------------------------------
# grids and table specs
# ---------------------------------------------------------------------------

def test_log_grid_shape():
    g = log_grid(1e3, 1e5, 8)
    assert len(g) == 17
    assert abs(g[0] - 1e3) < 1e-9 and abs(g[-1] - 1e5) < 1e-6
    steps = np.diff(np.log10(g))
    assert np.allclose(steps, steps[0])


def test_log_grid_validation():
    with pytest.raises(InvalidSpec):
        log_grid(1e4, 1e3, 8)
    with pytest.raises(InvalidSpec):
        log_grid(0.0, 1e3, 8)


def test_default_table_specs():
    t1 = default_table_spec(1)
    assert t1.sigma_list == (0.01, 0.1, 0.2, 0.3, 0.33)
    assert t1.windows == ((1e3, 1e4),)
    t2 = default_table_spec(2)
    assert t2.sigma_list == (0.0, 1e-4, 1e-3, 1e-2, 0.1)
    assert t2.windows == ((1e3, 1e4), (1e4, 1e5))
    t3 = default_table_spec(3)
    assert t3.sigma_list == (1e-4, 1e-3, 1e-2, 0.1)
    assert isinstance(t1.scheme, Quadrature) and t1.scheme.n_nodes == 33


def test_table_spec_validation():
    with pytest.raises(InvalidSpec):
        default_table_spec(4)
    with pytest.raises(InvalidSpec):
        TableSpec(table_id=1, sigma_list=(0.1,), windows=((1e3, 1e4),),
                  points_per_decade=3)
    with pytest.raises(InvalidSpec):
        TableSpec(table_id=1, sigma_list=(0.1,), windows=((10.0, 1e4),))
    with pytest.raises(InvalidSpec):
        TableSpec(table_id=1, sigma_list=(0.1,), windows=((1e3, 1e6),))


def test_reproduce_table_small_instance():
    spec = TableSpec(table_id=1, sigma_list=(0.1,), windows=((1e2, 1e3),),
                     points_per_decade=4, scheme=Quadrature(5))
    rows = reproduce_table(spec)
    assert len(rows) == 1
    assert rows[0].sigma == 0.1
    assert rows[0].nu_prime is None
    assert -0.6 < rows[0].nu < -0.1


def test_reproduce_table_3_has_prime_exponent():
    spec = TableSpec(table_id=3, sigma_list=(0.1,), windows=((1e2, 1e3),),
                     points_per_decade=4, scheme=Quadrature(5))
    rows = reproduce_table(spec)
    assert len(rows) == 1
    assert rows[0].nu_prime is not None
    # the averaged quench sits away from criticality, so it decays faster
    assert rows[0].nu_prime <= rows[0].nu


# ---------------------------------------------------------------------------
# convergence reports
# ---------------------------------------------------------------------------

def test_convergence_degenerate_sigma():
    base = QuenchSpec(g_final=1.0, omega_tau=100.0)
    model = DisorderModel(channel=DisorderChannel.TIME, sigma=0.0)
    rep = convergence_report(base, model, [3, 9, 17])
    assert all(d == 0.0 for _, _, d in rep.rows)
    assert rep.converged


def test_convergence_quadrature_refinement():
    base = QuenchSpec(g_final=1.0, omega_tau=1e3)
    model = DisorderModel(channel=DisorderChannel.TIME, sigma=0.1)
    rep = convergence_report(base, model, [9, 17, 33])
    final_n, final_mean, final_delta = rep.rows[-1]
    assert final_n == 33
    assert final_delta <= 1e-3 * final_mean
    assert rep.converged


def test_convergence_mc_stderr_shrinks():
    base = QuenchSpec(g_final=1.0, omega_tau=100.0)
    model = DisorderModel(channel=DisorderChannel.TIME, sigma=0.1)
    ses = []
    for n in (100, 1000):
        _, se = ensemble_residual_energy(base, model, MonteCarlo(n, seed=3))
        ses.append(se)
    ratio = ses[0] / ses[1]
    assert np.sqrt(10.0) * 0.5 <= ratio <= np.sqrt(10.0) * 1.5


def test_convergence_report_validation():
    base = QuenchSpec(g_final=1.0, omega_tau=100.0)
    model = DisorderModel(channel=DisorderChannel.TIME, sigma=0.1)
    with pytest.raises(InvalidSpec):
        convergence_report(base, model, [17, 9])
    with pytest.raises(InvalidSpec):
        convergence_report(base, model, [9, 17], mode="bootstrap")
