"""Power-law exponent estimation and reproduction of the survey tables.

The central quantity is nu, the slope of log Ebar_r against log(omega*tau)
inside a fit window.  Three standard datasets are reproduced:

* table 1: time disorder, critical quench, nu per sigma (one window),
* table 2: parameter disorder, nu per sigma in two windows,
* table 3: parameter disorder nu next to the exponent nu' of the single
  averaged quench g_final = 1 - sqrt(2/pi) sigma.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import linregress

from .disorder import (
    AveragingScheme,
    DisorderChannel,
    DisorderModel,
    MonteCarlo,
    Quadrature,
    averaged_g_final,
    ensemble_curve,
    ensemble_residual_energy,
)
from .dynamics import (
    DEFAULT_INTEGRATOR,
    IntegratorConfig,
    QuenchSpec,
    quench_residual_energy,
)
from .errors import InsufficientData, InvalidSpec, NonPositiveEnergy

__all__ = [
    "ScalingFit",
    "TableSpec",
    "TableRow",
    "ConvergenceReport",
    "fit_power_law",
    "log_grid",
    "default_table_spec",
    "reproduce_table",
    "convergence_report",
]

WINDOW_SLACK = 1e-9         # relative tolerance when testing window membership
TABLE_WINDOW_FLOOR = 1e2
TABLE_WINDOW_CEIL = 1e5


@dataclass(frozen=True)
class ScalingFit:
    """Least-squares power law Ebar_r = C (omega_tau)^nu on a log-log window."""

    nu: float
    log_intercept: float
    stderr_nu: float
    window: tuple
    r_squared: float
    n_points: int

    def __post_init__(self):
        if not self.window[0] < self.window[1]:
            raise InvalidSpec(f"empty fit window {self.window}")
        if self.n_points < 3:
            raise InvalidSpec("a fit needs at least 3 points")
        if not 0.0 <= self.r_squared <= 1.0 + 1e-12:
            raise InvalidSpec(f"r_squared {self.r_squared} outside [0, 1]")


def fit_power_law(points, window) -> ScalingFit:
    """OLS fit of log(energy) vs log(omega_tau) restricted to the window.

    points: iterable of (omega_tau, energy) pairs, energies in hbar*omega.
    Raises InsufficientData with fewer than 3 in-window points and
    NonPositiveEnergy when a selected energy has no logarithm.
    """
    lo, hi = float(window[0]), float(window[1])
    if not lo < hi:
        raise InvalidSpec(f"empty fit window {window}")
    xs, ys = [], []
    for x, y in points:
        if lo * (1.0 - WINDOW_SLACK) <= x <= hi * (1.0 + WINDOW_SLACK):
            xs.append(float(x))
            ys.append(float(y))
    if len(xs) < 3:
        raise InsufficientData(
            f"{len(xs)} points inside window [{lo:g}, {hi:g}], need >= 3"
        )
    if min(ys) <= 0.0:
        raise NonPositiveEnergy(
            f"non-positive energy {min(ys):g} in window [{lo:g}, {hi:g}]"
        )
    res = linregress(np.log(xs), np.log(ys))
    return ScalingFit(
        nu=float(res.slope),
        log_intercept=float(res.intercept),
        stderr_nu=float(res.stderr),
        window=(lo, hi),
        r_squared=float(res.rvalue) ** 2,
        n_points=len(xs),
    )


def log_grid(lo: float, hi: float, points_per_decade: int) -> np.ndarray:
    """Log-spaced grid from lo to hi inclusive at the given density."""
    if not 0 < lo < hi:
        raise InvalidSpec(f"need 0 < lo < hi, got [{lo}, {hi}]")
    n = round(math.log10(hi / lo) * points_per_decade) + 1
    return np.logspace(math.log10(lo), math.log10(hi), max(n, 2))


# ---------------------------------------------------------------------------
# table reproduction
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TableSpec:
    """What to sweep when reproducing one of the survey tables."""

    table_id: int
    sigma_list: tuple
    windows: tuple                    # ((lo, hi), ...)
    points_per_decade: int = 8
    scheme: AveragingScheme = field(default_factory=Quadrature)
    cfg: IntegratorConfig = DEFAULT_INTEGRATOR

    def __post_init__(self):
        if self.table_id not in (1, 2, 3):
            raise InvalidSpec(f"table_id must be 1, 2 or 3, got {self.table_id}")
        if self.points_per_decade < 4:
            raise InvalidSpec("points_per_decade must be >= 4")
        for lo, hi in self.windows:
            if not (TABLE_WINDOW_FLOOR <= lo < hi <= TABLE_WINDOW_CEIL):
                raise InvalidSpec(
                    f"window [{lo:g}, {hi:g}] outside "
                    f"[{TABLE_WINDOW_FLOOR:g}, {TABLE_WINDOW_CEIL:g}]"
                )


@dataclass(frozen=True)
class TableRow:
    sigma: float
    window: tuple
    nu: float
    nu_prime: float | None = None


def default_table_spec(table_id: int) -> TableSpec:
    """Sweep definitions matching the published tables."""
    if table_id == 1:
        return TableSpec(
            table_id=1,
            sigma_list=(0.01, 0.1, 0.2, 0.3, 0.33),
            windows=((1e3, 1e4),),
        )
    if table_id == 2:
        return TableSpec(
            table_id=2,
            sigma_list=(0.0, 1e-4, 1e-3, 1e-2, 0.1),
            windows=((1e3, 1e4), (1e4, 1e5)),
        )
    if table_id == 3:
        return TableSpec(
            table_id=3,
            sigma_list=(1e-4, 1e-3, 1e-2, 0.1),
            windows=((1e3, 1e4),),
        )
    raise InvalidSpec(f"table_id must be 1, 2 or 3, got {table_id}")


def reproduce_table(spec: TableSpec, jobs: int = 1) -> list:
    """Run the sweeps for one table and fit the exponents.

    Returns TableRow entries: one per (sigma, window) for tables 1-2, one per
    sigma (with nu and nu') for table 3.  The full omega_tau grid spanning all
    windows is integrated once per sigma and reused for every window fit.
    """
    channel = DisorderChannel.TIME if spec.table_id == 1 else DisorderChannel.PARAM
    lo = min(w[0] for w in spec.windows)
    hi = max(w[1] for w in spec.windows)
    grid = log_grid(lo, hi, spec.points_per_decade)
    rows = []
    for sigma in spec.sigma_list:
        model = DisorderModel(channel=channel, sigma=float(sigma))
        curve = ensemble_curve(1.0, grid, model, spec.scheme, spec.cfg, jobs=jobs)
        points = list(zip(curve.omega_tau_grid, curve.mean_Er))
        fits = [fit_power_law(points, w) for w in spec.windows]
        if spec.table_id == 3:
            g_avg = averaged_g_final(float(sigma))
            avg_points = [
                (x, quench_residual_energy(QuenchSpec(g_final=g_avg, omega_tau=x),
                                           spec.cfg))
                for x in grid
            ]
            prime = fit_power_law(avg_points, spec.windows[0])
            rows.append(TableRow(sigma=float(sigma), window=spec.windows[0],
                                 nu=fits[0].nu, nu_prime=prime.nu))
        else:
            for w, f in zip(spec.windows, fits):
                rows.append(TableRow(sigma=float(sigma), window=w, nu=f.nu))
    return rows


# ---------------------------------------------------------------------------
# convergence diagnostics
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ConvergenceReport:
    """Ensemble mean under successive refinement of the averaging scheme.

    rows: (n, mean_Er, delta_vs_prev) with delta_vs_prev = 0 for the first.
    converged: final refinement delta within 1% of the final mean.
    """

    rows: tuple
    converged: bool


def convergence_report(
    base: QuenchSpec,
    model: DisorderModel,
    node_counts,
    mode: str = "quadrature",
    seed: int = 0,
    cfg: IntegratorConfig = DEFAULT_INTEGRATOR,
) -> ConvergenceReport:
    """Refine the averaging scheme over node_counts (ascending) and track
    how the quenched mean moves."""
    counts = [int(n) for n in node_counts]
    if counts != sorted(counts) or len(counts) < 2:
        raise InvalidSpec("node_counts must be ascending with >= 2 entries")
    if mode not in ("quadrature", "mc"):
        raise InvalidSpec(f"mode must be 'quadrature' or 'mc', got {mode!r}")
    rows = []
    prev = None
    for n in counts:
        scheme = Quadrature(n_nodes=n) if mode == "quadrature" else MonteCarlo(n, seed)
        mean, _ = ensemble_residual_energy(base, model, scheme, cfg)
        delta = 0.0 if prev is None else abs(mean - prev)
        rows.append((n, mean, delta))
        prev = mean
    final_mean = rows[-1][1]
    final_delta = rows[-1][2]
    converged = final_delta <= 0.01 * abs(final_mean) or final_delta == 0.0
    return ConvergenceReport(rows=tuple(rows), converged=converged)
