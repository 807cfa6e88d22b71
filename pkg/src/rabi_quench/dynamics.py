"""Quench dynamics of the Rabi normal phase in the Heisenberg picture.

The cavity mode is parameterized by a pair of complex Bogoliubov
coefficients (u, v) with a(t) = u(t) a(0) + v*(t) a†(0).  For a linear
ramp of the dimensionless coupling g from 0 to g_final over a duration
tau, the pair obeys (in rescaled time s = omega*t)

    du/ds = -i [(1 - g^2/2) u - (g^2/2) v]
    dv/ds = +i [(1 - g^2/2) v - (g^2/2) u]

with u(0) = 1, v(0) = 0 and the conserved hyperbolic normalization
|u|^2 - |v|^2 = 1.  All times in this module are the dimensionless
omega*t and all energies are in units of hbar*omega.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from .errors import ConstraintViolation, ConvergenceFailure, InvalidCoupling, InvalidSpec

__all__ = [
    "PhysicalParams",
    "QuenchSpec",
    "BogoliubovState",
    "IntegratorConfig",
    "rhs",
    "integrate_quench",
    "max_constraint_drift",
    "trajectory",
    "residual_energy",
    "quench_residual_energy",
    "ground_energy_shift",
    "energy_gap",
]


# ---------------------------------------------------------------------------
# domain types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PhysicalParams:
    """Physical conventions: cavity frequency and the energy unit.

    Energies everywhere are reported in units of hbar*omega, so omega only
    matters when converting back to laboratory units.
    """

    omega: float = 1.0          # cavity field frequency, rad/time
    energy_unit: str = "hbar_omega"

    def __post_init__(self):
        if not self.omega > 0:
            raise InvalidSpec(f"omega must be positive, got {self.omega}")


@dataclass(frozen=True)
class QuenchSpec:
    """One linear quench: g(t) = g_final * t / tau on 0 <= t <= tau.

    g_final must stay in [0, 1]; the normal-phase Hamiltonian is only
    valid up to the critical coupling.  omega_tau is the dimensionless
    duration omega*tau.
    """

    g_final: float
    omega_tau: float

    def __post_init__(self):
        if not 0.0 <= self.g_final <= 1.0:
            raise InvalidSpec(
                f"g_final must lie in [0, 1] (normal phase), got {self.g_final}"
            )
        if not self.omega_tau > 0:
            raise InvalidSpec(f"omega_tau must be positive, got {self.omega_tau}")

    def coupling_at(self, s: float) -> float:
        """Instantaneous coupling at dimensionless time s in [0, omega_tau]."""
        return self.g_final * s / self.omega_tau


@dataclass(frozen=True)
class BogoliubovState:
    """Bogoliubov pair (u, v) at dimensionless time omega_t."""

    u: complex
    v: complex
    omega_t: float = 0.0

    def constraint_defect(self) -> float:
        """| |u|^2 - |v|^2 - 1 |, zero for the exact flow."""
        return abs(abs(self.u) ** 2 - abs(self.v) ** 2 - 1.0)


INITIAL_STATE = BogoliubovState(u=1.0 + 0.0j, v=0.0 + 0.0j, omega_t=0.0)


@dataclass(frozen=True)
class IntegratorConfig:
    """Integration controls.

    fixed mode: classical RK4 with uniform step <= omega_dt (the duration is
    divided into an integer number of equal steps, so sweeps are
    bit-reproducible).  adaptive mode: Dormand-Prince 5(4) embedded pair with
    per-step error control.  The constraint defect is monitored at every step
    in either mode; integrate_quench raises if it exceeds constraint_tol.
    """

    step_mode: str = "fixed"            # "fixed" | "adaptive"
    omega_dt: float = 5e-3              # dimensionless step, fixed mode
    rel_tol: float = 1e-10              # adaptive mode local error control
    abs_tol: float = 1e-12
    constraint_tol: float = 1e-8

    def __post_init__(self):
        if self.step_mode not in ("fixed", "adaptive"):
            raise InvalidSpec(f"unknown step_mode {self.step_mode!r}")
        if not self.omega_dt > 0:
            raise InvalidSpec("omega_dt must be positive")
        if not (self.rel_tol > 0 and self.abs_tol > 0 and self.constraint_tol > 0):
            raise InvalidSpec("tolerances must be positive")


DEFAULT_INTEGRATOR = IntegratorConfig()


# ---------------------------------------------------------------------------
# equations of motion
# ---------------------------------------------------------------------------

def rhs(state: BogoliubovState, g: float):
    """Time derivatives (du/ds, dv/ds) at coupling g, s = omega*t.

    Pure function; g must lie in [0, 1].
    """
    half_g2 = 0.5 * g * g
    du = -1j * ((1.0 - half_g2) * state.u - half_g2 * state.v)
    dv = 1j * ((1.0 - half_g2) * state.v - half_g2 * state.u)
    return du, dv


@njit(cache=True, nogil=True)
def _rk4_final(g_final, s_total, dt):
    """Fixed-step RK4 from s=0 to s=s_total.  Returns (u, v, max_defect)."""
    n = int(math.ceil(s_total / dt - 1e-12))
    if n < 1:
        n = 1
    h = s_total / n
    slope = g_final / s_total
    u = 1.0 + 0.0j
    v = 0.0 + 0.0j
    max_defect = 0.0
    for k in range(n):
        s = k * h
        g = slope * s
        b = 0.5 * g * g
        a = 1.0 - b
        k1u = -1j * (a * u - b * v)
        k1v = 1j * (a * v - b * u)
        g = slope * (s + 0.5 * h)
        b = 0.5 * g * g
        a = 1.0 - b
        u2 = u + 0.5 * h * k1u
        v2 = v + 0.5 * h * k1v
        k2u = -1j * (a * u2 - b * v2)
        k2v = 1j * (a * v2 - b * u2)
        u3 = u + 0.5 * h * k2u
        v3 = v + 0.5 * h * k2v
        k3u = -1j * (a * u3 - b * v3)
        k3v = 1j * (a * v3 - b * u3)
        g = slope * (s + h)
        b = 0.5 * g * g
        a = 1.0 - b
        u4 = u + h * k3u
        v4 = v + h * k3v
        k4u = -1j * (a * u4 - b * v4)
        k4v = 1j * (a * v4 - b * u4)
        u = u + (h / 6.0) * (k1u + 2.0 * k2u + 2.0 * k3u + k4u)
        v = v + (h / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)
        d = abs((u.real * u.real + u.imag * u.imag)
                - (v.real * v.real + v.imag * v.imag) - 1.0)
        if d > max_defect:
            max_defect = d
    return u, v, max_defect


@njit(cache=True, nogil=True)
def _rk4_sampled(g_final, s_total, dt, n_samples):
    """Like _rk4_final but records (u, v, defect) at n_samples+1 evenly
    spaced step boundaries (including s=0 and s=s_total)."""
    n = int(math.ceil(s_total / dt - 1e-12))
    if n < n_samples:
        n = n_samples
    h = s_total / n
    slope = g_final / s_total
    u = 1.0 + 0.0j
    v = 0.0 + 0.0j
    s_out = np.empty(n_samples + 1)
    u_out = np.empty(n_samples + 1, dtype=np.complex128)
    v_out = np.empty(n_samples + 1, dtype=np.complex128)
    d_out = np.empty(n_samples + 1)
    s_out[0] = 0.0
    u_out[0] = u
    v_out[0] = v
    d_out[0] = 0.0
    idx = 1
    next_record = (idx * n) // n_samples
    for k in range(n):
        s = k * h
        g = slope * s
        b = 0.5 * g * g
        a = 1.0 - b
        k1u = -1j * (a * u - b * v)
        k1v = 1j * (a * v - b * u)
        g = slope * (s + 0.5 * h)
        b = 0.5 * g * g
        a = 1.0 - b
        u2 = u + 0.5 * h * k1u
        v2 = v + 0.5 * h * k1v
        k2u = -1j * (a * u2 - b * v2)
        k2v = 1j * (a * v2 - b * u2)
        u3 = u + 0.5 * h * k2u
        v3 = v + 0.5 * h * k2v
        k3u = -1j * (a * u3 - b * v3)
        k3v = 1j * (a * v3 - b * u3)
        g = slope * (s + h)
        b = 0.5 * g * g
        a = 1.0 - b
        u4 = u + h * k3u
        v4 = v + h * k3v
        k4u = -1j * (a * u4 - b * v4)
        k4v = 1j * (a * v4 - b * u4)
        u = u + (h / 6.0) * (k1u + 2.0 * k2u + 2.0 * k3u + k4u)
        v = v + (h / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)
        if k + 1 == next_record:
            s_out[idx] = (k + 1) * h
            u_out[idx] = u
            v_out[idx] = v
            d_out[idx] = abs((u.real * u.real + u.imag * u.imag)
                             - (v.real * v.real + v.imag * v.imag) - 1.0)
            idx += 1
            if idx <= n_samples:
                next_record = (idx * n) // n_samples
    return s_out, u_out, v_out, d_out


@njit(cache=True, nogil=True)
def _dp54_final(g_final, s_total, rel_tol, abs_tol, h_max):
    """Adaptive Dormand-Prince 5(4) from s=0 to s=s_total.

    Returns (u, v, max_defect, ok); ok=False when the controller collapses
    the step below the useful range (does not happen for this linear system
    unless tolerances are absurd).
    """
    slope = g_final / s_total
    u = 1.0 + 0.0j
    v = 0.0 + 0.0j
    s = 0.0
    max_defect = 0.0
    h = min(1e-3, s_total, h_max)
    # first-same-as-last: stage 7 of an accepted step is stage 1 of the next
    g = 0.0
    b = 0.5 * g * g
    a = 1.0 - b
    k1u = -1j * (a * u - b * v)
    k1v = 1j * (a * v - b * u)
    while s < s_total:
        if h > s_total - s:
            h = s_total - s
        # stage 2
        g = slope * (s + 0.2 * h)
        b = 0.5 * g * g
        a = 1.0 - b
        yu = u + h * 0.2 * k1u
        yv = v + h * 0.2 * k1v
        k2u = -1j * (a * yu - b * yv)
        k2v = 1j * (a * yv - b * yu)
        # stage 3
        g = slope * (s + 0.3 * h)
        b = 0.5 * g * g
        a = 1.0 - b
        yu = u + h * (3.0 / 40.0 * k1u + 9.0 / 40.0 * k2u)
        yv = v + h * (3.0 / 40.0 * k1v + 9.0 / 40.0 * k2v)
        k3u = -1j * (a * yu - b * yv)
        k3v = 1j * (a * yv - b * yu)
        # stage 4
        g = slope * (s + 0.8 * h)
        b = 0.5 * g * g
        a = 1.0 - b
        yu = u + h * (44.0 / 45.0 * k1u - 56.0 / 15.0 * k2u + 32.0 / 9.0 * k3u)
        yv = v + h * (44.0 / 45.0 * k1v - 56.0 / 15.0 * k2v + 32.0 / 9.0 * k3v)
        k4u = -1j * (a * yu - b * yv)
        k4v = 1j * (a * yv - b * yu)
        # stage 5
        g = slope * (s + 8.0 / 9.0 * h)
        b = 0.5 * g * g
        a = 1.0 - b
        yu = u + h * (19372.0 / 6561.0 * k1u - 25360.0 / 2187.0 * k2u
                      + 64448.0 / 6561.0 * k3u - 212.0 / 729.0 * k4u)
        yv = v + h * (19372.0 / 6561.0 * k1v - 25360.0 / 2187.0 * k2v
                      + 64448.0 / 6561.0 * k3v - 212.0 / 729.0 * k4v)
        k5u = -1j * (a * yu - b * yv)
        k5v = 1j * (a * yv - b * yu)
        # stage 6
        g = slope * (s + h)
        b = 0.5 * g * g
        a = 1.0 - b
        yu = u + h * (9017.0 / 3168.0 * k1u - 355.0 / 33.0 * k2u
                      + 46732.0 / 5247.0 * k3u + 49.0 / 176.0 * k4u
                      - 5103.0 / 18656.0 * k5u)
        yv = v + h * (9017.0 / 3168.0 * k1v - 355.0 / 33.0 * k2v
                      + 46732.0 / 5247.0 * k3v + 49.0 / 176.0 * k4v
                      - 5103.0 / 18656.0 * k5v)
        k6u = -1j * (a * yu - b * yv)
        k6v = 1j * (a * yv - b * yu)
        # 5th order solution (also stage 7 location)
        un = u + h * (35.0 / 384.0 * k1u + 500.0 / 1113.0 * k3u
                      + 125.0 / 192.0 * k4u - 2187.0 / 6784.0 * k5u
                      + 11.0 / 84.0 * k6u)
        vn = v + h * (35.0 / 384.0 * k1v + 500.0 / 1113.0 * k3v
                      + 125.0 / 192.0 * k4v - 2187.0 / 6784.0 * k5v
                      + 11.0 / 84.0 * k6v)
        k7u = -1j * (a * un - b * vn)
        k7v = 1j * (a * vn - b * un)
        # embedded error estimate
        eu = h * (71.0 / 57600.0 * k1u - 71.0 / 16695.0 * k3u
                  + 71.0 / 1920.0 * k4u - 17253.0 / 339200.0 * k5u
                  + 22.0 / 525.0 * k6u - 1.0 / 40.0 * k7u)
        ev = h * (71.0 / 57600.0 * k1v - 71.0 / 16695.0 * k3v
                  + 71.0 / 1920.0 * k4v - 17253.0 / 339200.0 * k5v
                  + 22.0 / 525.0 * k6v - 1.0 / 40.0 * k7v)
        scu = abs_tol + rel_tol * max(abs(u), abs(un))
        scv = abs_tol + rel_tol * max(abs(v), abs(vn))
        err = math.sqrt(0.5 * ((abs(eu) / scu) ** 2 + (abs(ev) / scv) ** 2))
        if err <= 1.0:
            s += h
            u = un
            v = vn
            k1u = k7u
            k1v = k7v
            d = abs((u.real * u.real + u.imag * u.imag)
                    - (v.real * v.real + v.imag * v.imag) - 1.0)
            if d > max_defect:
                max_defect = d
        if err == 0.0:
            factor = 5.0
        else:
            factor = min(5.0, max(0.2, 0.9 * err ** -0.2))
        h = min(h * factor, h_max)
        if h < 1e-14 * s_total:
            return u, v, max_defect, False
    return u, v, max_defect, True


# ---------------------------------------------------------------------------
# integration front ends
# ---------------------------------------------------------------------------

def integrate_quench(
    spec: QuenchSpec,
    cfg: IntegratorConfig = DEFAULT_INTEGRATOR,
) -> BogoliubovState:
    """Integrate the quench and return the final state at s = omega_tau.

    Raises ConstraintViolation if the hyperbolic normalization drifted by
    more than cfg.constraint_tol anywhere along the trajectory.
    """
    if cfg.step_mode == "fixed":
        u, v, defect = _rk4_final(spec.g_final, spec.omega_tau, cfg.omega_dt)
    else:
        u, v, defect, ok = _dp54_final(
            spec.g_final, spec.omega_tau, cfg.rel_tol, cfg.abs_tol, h_max=0.1
        )
        if not ok:
            raise ConvergenceFailure(
                f"adaptive step collapsed for g_final={spec.g_final}, "
                f"omega_tau={spec.omega_tau}"
            )
    if defect > cfg.constraint_tol:
        raise ConstraintViolation(
            f"normalization drift {defect:.3e} > {cfg.constraint_tol:.1e} for "
            f"g_final={spec.g_final}, omega_tau={spec.omega_tau}; reduce the step"
        )
    return BogoliubovState(u=u, v=v, omega_t=spec.omega_tau)


def max_constraint_drift(
    spec: QuenchSpec,
    cfg: IntegratorConfig = DEFAULT_INTEGRATOR,
) -> float:
    """Largest normalization defect | |u|^2-|v|^2 - 1 | over all steps.

    Diagnostic form of integrate_quench: reports the drift instead of
    raising on it.
    """
    if cfg.step_mode == "fixed":
        _, _, defect = _rk4_final(spec.g_final, spec.omega_tau, cfg.omega_dt)
    else:
        _, _, defect, _ = _dp54_final(
            spec.g_final, spec.omega_tau, cfg.rel_tol, cfg.abs_tol, h_max=0.1
        )
    return defect


def trajectory(
    spec: QuenchSpec,
    cfg: IntegratorConfig = DEFAULT_INTEGRATOR,
    n_samples: int = 256,
):
    """Integrate while recording n_samples+1 snapshots, s=0 included.

    Returns (s, u, v, defect) arrays.  Sampling always uses the fixed-step
    scheme; snapshots land on step boundaries.
    """
    s, u, v, d = _rk4_sampled(spec.g_final, spec.omega_tau, cfg.omega_dt, n_samples)
    if d.max() > cfg.constraint_tol:
        raise ConstraintViolation(
            f"normalization drift {d.max():.3e} > {cfg.constraint_tol:.1e} for "
            f"g_final={spec.g_final}, omega_tau={spec.omega_tau}"
        )
    return s, u, v, d


# ---------------------------------------------------------------------------
# energies
# ---------------------------------------------------------------------------

def _check_coupling(g: float) -> None:
    if not 0.0 <= g <= 1.0:
        raise InvalidCoupling(f"coupling must lie in [0, 1], got {g}")


def residual_energy(
    state: BogoliubovState,
    g_f: float,
    params: PhysicalParams | None = None,
) -> float:
    """Energy above the instantaneous ground state at coupling g_f, in hbar*omega.

        E_r = |v|^2 - (g_f^2/4) |u + v|^2 - (sqrt(1 - g_f^2) - 1)/2

    Non-negative up to integrator tolerance for any physical state.
    """
    _check_coupling(g_f)
    u, v = state.u, state.v
    return (
        abs(v) ** 2
        - 0.25 * g_f * g_f * abs(u + v) ** 2
        - ground_energy_shift(g_f)
    )


def ground_energy_shift(g: float) -> float:
    """Ground-state energy of the quadratic mode relative to g=0, in hbar*omega."""
    _check_coupling(g)
    return 0.5 * (math.sqrt(1.0 - g * g) - 1.0)


def energy_gap(g: float) -> float:
    """Gap to the first parity-allowed excited state, 2*sqrt(1-g^2), in hbar*omega."""
    _check_coupling(g)
    return 2.0 * math.sqrt(1.0 - g * g)


def quench_residual_energy(
    spec: QuenchSpec,
    cfg: IntegratorConfig = DEFAULT_INTEGRATOR,
) -> float:
    """Integrate one quench and evaluate its residual energy (hbar*omega)."""
    return residual_energy(integrate_quench(spec, cfg), spec.g_final)
