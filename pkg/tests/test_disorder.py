"""Disorder channels: densities, realizations, weights, and quenched means."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from rabi_quench import (
    DisorderChannel,
    DisorderModel,
    IntegratorConfig,
    InvalidDispersion,
    InvalidScheme,
    MonteCarlo,
    OutOfSupport,
    Quadrature,
    QuenchSpec,
    averaged_g_final,
    effective_quench,
    ensemble_curve,
    ensemble_residual_energy,
    quench_residual_energy,
    realizations,
    truncated_gaussian_pdf,
)

TIME = DisorderChannel.TIME
PARAM = DisorderChannel.PARAM


# ---------------------------------------------------------------------------
# density
# ---------------------------------------------------------------------------

def test_pdf_peak_value():
    # 1/(sqrt(2 pi) * 0.1 * erf(3/sqrt 2))
    expect = 1.0 / (math.sqrt(2 * math.pi) * 0.1 * math.erf(3 / math.sqrt(2)))
    assert abs(expect - 4.00022) < 5e-6
    assert abs(truncated_gaussian_pdf(0.0, 0.1) - expect) < 1e-14


def test_pdf_outside_support():
    assert truncated_gaussian_pdf(0.31, 0.1) == 0.0
    assert truncated_gaussian_pdf(-0.31, 0.1) == 0.0


@pytest.mark.parametrize("sigma", [0.01, 0.1, 0.33])
def test_pdf_normalizes(sigma):
    val, err = quad(truncated_gaussian_pdf, -3 * sigma, 3 * sigma, args=(sigma,))
    assert abs(val - 1.0) <= 1e-10


def test_pdf_symmetry():
    rng = np.random.default_rng(1)
    for _ in range(100):
        d = rng.uniform(-0.4, 0.4)
        assert truncated_gaussian_pdf(d, 0.1) == truncated_gaussian_pdf(-d, 0.1)


def test_pdf_rejects_bad_sigma():
    with pytest.raises(InvalidDispersion):
        truncated_gaussian_pdf(0.0, 0.0)
    with pytest.raises(InvalidDispersion):
        truncated_gaussian_pdf(0.0, -0.1)


# ---------------------------------------------------------------------------
# model and scheme validation
# ---------------------------------------------------------------------------

def test_model_sigma_ranges():
    DisorderModel(channel=TIME, sigma=1.0 / 3.0)
    DisorderModel(channel=PARAM, sigma=0.1)
    with pytest.raises(InvalidDispersion):
        DisorderModel(channel=TIME, sigma=0.34)
    with pytest.raises(InvalidDispersion):
        DisorderModel(channel=PARAM, sigma=0.11)
    with pytest.raises(InvalidDispersion):
        DisorderModel(channel=TIME, sigma=-0.1)


def test_scheme_validation():
    with pytest.raises(InvalidScheme):
        MonteCarlo(n_samples=1)
    with pytest.raises(InvalidScheme):
        Quadrature(n_nodes=2)


# ---------------------------------------------------------------------------
# effective quench
# ---------------------------------------------------------------------------

def test_time_disorder_rescales_duration():
    base = QuenchSpec(g_final=1.0, omega_tau=1e3)
    model = DisorderModel(channel=TIME, sigma=0.1)
    eff = effective_quench(model, base, 0.2)
    assert eff.omega_tau == 1200.0
    assert eff.g_final == 1.0


def test_param_disorder_lowers_coupling():
    base = QuenchSpec(g_final=1.0, omega_tau=1e3)
    model = DisorderModel(channel=PARAM, sigma=0.1)
    assert effective_quench(model, base, 0.0).g_final == 1.0
    assert effective_quench(model, base, -0.05).g_final == 0.95
    assert effective_quench(model, base, -0.05).omega_tau == 1e3


def test_effective_quench_out_of_support():
    base = QuenchSpec(g_final=1.0, omega_tau=1e3)
    with pytest.raises(OutOfSupport):
        effective_quench(DisorderModel(channel=TIME, sigma=0.1), base, 0.31)
    with pytest.raises(OutOfSupport):
        effective_quench(DisorderModel(channel=PARAM, sigma=0.1), base, 1.0)


@settings(max_examples=50)
@given(delta=st.floats(-0.3, 0.3))
def test_time_disorder_duration_exact(delta):
    base = QuenchSpec(g_final=1.0, omega_tau=500.0)
    model = DisorderModel(channel=TIME, sigma=0.1)
    assert effective_quench(model, base, delta).omega_tau == 500.0 * (1.0 + delta)


# ---------------------------------------------------------------------------
# realizations
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("channel", [TIME, PARAM])
@pytest.mark.parametrize("n", [3, 9, 21, 33])
def test_quadrature_weights_sum_to_one(channel, n):
    sigma = 0.1 if channel is PARAM else 0.2
    d, w = realizations(DisorderModel(channel=channel, sigma=sigma), Quadrature(n))
    assert len(d) == len(w) == n
    assert abs(w.sum() - 1.0) <= 1e-12
    assert (w > 0).all()


def test_quadrature_degenerate_sigma():
    d, w = realizations(DisorderModel(channel=TIME, sigma=0.0), Quadrature(33))
    assert list(d) == [0.0] and list(w) == [1.0]


def test_quadrature_integrates_smooth_moments():
    # the reweighted nodes must reproduce truncated-normal moments
    model = DisorderModel(channel=TIME, sigma=0.1)
    d, w = realizations(model, Quadrature(33))
    for k in (1, 2, 3, 4):
        direct, _ = quad(
            lambda x: x ** k * truncated_gaussian_pdf(x, 0.1), -0.3, 0.3
        )
        assert abs(float(np.dot(w, d ** k)) - direct) < 1e-12


def test_param_quadrature_mean_coupling():
    # 21-node folded rule against the closed-form mean 1 - sqrt(2/pi) sigma
    model = DisorderModel(channel=PARAM, sigma=0.1)
    d, w = realizations(model, Quadrature(21))
    got = float(np.dot(w, 1.0 - np.abs(d)))
    assert abs(got - 0.920212) < 1e-3
    assert (d >= 0).all()


def test_mc_time_disorder_bounds():
    model = DisorderModel(channel=TIME, sigma=0.1)
    d, w = realizations(model, MonteCarlo(100000, seed=2))
    assert np.abs(d).max() <= 0.3
    assert abs(d.mean()) <= 3e-3
    assert abs(w.sum() - 1.0) <= 1e-12


def test_mc_param_disorder_support():
    model = DisorderModel(channel=PARAM, sigma=0.1)
    d, _ = realizations(model, MonteCarlo(100000, seed=3))
    assert np.abs(d).max() < 1.0
    assert abs(d.std() - 0.1) < 2e-3


def test_mc_seed_determinism():
    model = DisorderModel(channel=TIME, sigma=0.1)
    a, _ = realizations(model, MonteCarlo(1000, seed=4))
    b, _ = realizations(model, MonteCarlo(1000, seed=4))
    c, _ = realizations(model, MonteCarlo(1000, seed=5))
    assert (a == b).all()
    assert not (a == c).all()


def test_averaged_g_final_values():
    assert averaged_g_final(0.0) == 1.0
    assert abs(averaged_g_final(0.1) - 0.920212) < 1e-6
    assert abs(averaged_g_final(0.01) - 0.992021) < 1e-6


# ---------------------------------------------------------------------------
# quenched averages
# ---------------------------------------------------------------------------

def test_degenerate_sigma_equals_ordered_quench():
    base = QuenchSpec(g_final=1.0, omega_tau=200.0)
    ordered = quench_residual_energy(base)
    for channel in (TIME, PARAM):
        model = DisorderModel(channel=channel, sigma=0.0)
        mean, stderr = ensemble_residual_energy(base, model, Quadrature(33))
        assert mean == ordered
        assert stderr == 0.0


def test_small_sigma_continuity():
    # sigma -> 0: the quenched mean approaches the ordered value.  The time
    # channel responds linearly (dev 5e-9 at sigma=1e-4); the coupling channel
    # has a sqrt(sigma) cusp at criticality (dev 2e-2 even at sigma=1e-6), so
    # for it we only pin the decrease towards zero.
    base = QuenchSpec(g_final=1.0, omega_tau=1e3)
    ordered = quench_residual_energy(base)

    model = DisorderModel(channel=TIME, sigma=1e-4)
    mean, _ = ensemble_residual_energy(base, model, Quadrature(33))
    assert abs(mean - ordered) / ordered <= 0.01

    devs = []
    for sigma in (1e-4, 1e-5, 1e-6):
        model = DisorderModel(channel=PARAM, sigma=sigma)
        mean, _ = ensemble_residual_energy(base, model, Quadrature(33))
        devs.append(abs(mean - ordered) / ordered)
    assert devs[0] > devs[1] > devs[2]
    assert devs[-1] <= 0.05


def test_ensemble_determinism_mc():
    base = QuenchSpec(g_final=1.0, omega_tau=100.0)
    model = DisorderModel(channel=TIME, sigma=0.1)
    scheme = MonteCarlo(64, seed=6)
    assert ensemble_residual_energy(base, model, scheme) == ensemble_residual_energy(
        base, model, scheme
    )


def test_mc_quadrature_agreement():
    # reference instance: same mean from both averaging routes within 3 MC
    # standard errors
    base = QuenchSpec(g_final=1.0, omega_tau=1e3)
    model = DisorderModel(channel=TIME, sigma=0.1)
    mq, _ = ensemble_residual_energy(base, model, Quadrature(33))
    mm, se = ensemble_residual_energy(base, model, MonteCarlo(10000, seed=11))
    assert abs(mq - mm) <= 3.0 * se


def test_integration_error_annotated_with_delta():
    base = QuenchSpec(g_final=1.0, omega_tau=150.0)
    model = DisorderModel(channel=TIME, sigma=0.1)
    strict = IntegratorConfig(omega_dt=0.2, constraint_tol=1e-14)
    with pytest.raises(Exception, match="delta="):
        ensemble_residual_energy(base, model, Quadrature(5), strict)


def test_ensemble_curve_sorted_and_job_invariant():
    model = DisorderModel(channel=TIME, sigma=0.1)
    grid = [200.0, 50.0, 100.0]
    a = ensemble_curve(1.0, grid, model, Quadrature(9), jobs=1)
    b = ensemble_curve(1.0, grid, model, Quadrature(9), jobs=3)
    assert a.omega_tau_grid == (50.0, 100.0, 200.0)
    assert a.mean_Er == b.mean_Er
    assert a.stderr_Er == b.stderr_Er
    assert all(e >= -1e-10 for e in a.mean_Er)
    assert a.n_realizations == 9


def test_ensemble_curve_mc_job_invariant():
    model = DisorderModel(channel=PARAM, sigma=0.01)
    grid = [50.0, 150.0]
    a = ensemble_curve(1.0, grid, model, MonteCarlo(16, seed=9), jobs=1)
    b = ensemble_curve(1.0, grid, model, MonteCarlo(16, seed=9), jobs=2)
    assert a.mean_Er == b.mean_Er and a.stderr_Er == b.stderr_Er
