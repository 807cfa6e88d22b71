"""Quench dynamics of the Rabi normal phase under quenched disorder.

Library layout:

* dynamics:  Bogoliubov pair integration and residual energy
* disorder:  disorder channels, realizations, quenched averages
* analytics: APT and freeze-out (Kibble-Zurek) closed forms
* scaling:   power-law fits, table reproduction, convergence checks
* config/cli: flat-file configuration and the experiment runner
"""

from .analytics import (
    FreezeOut,
    apt_residual_energy,
    freezeout_eps_series,
    freezeout_eps_series_alt,
    freezeout_g,
    freezeout_g_series,
    frozen_apt_residual_energy,
    kzm_averaged_prediction,
    kzm_residual_energy,
)
from .disorder import (
    DisorderChannel,
    DisorderModel,
    EnsembleResult,
    MonteCarlo,
    Quadrature,
    averaged_g_final,
    effective_quench,
    ensemble_curve,
    ensemble_residual_energy,
    realizations,
    truncated_gaussian_pdf,
)
from .dynamics import (
    BogoliubovState,
    IntegratorConfig,
    PhysicalParams,
    QuenchSpec,
    energy_gap,
    ground_energy_shift,
    integrate_quench,
    max_constraint_drift,
    quench_residual_energy,
    residual_energy,
    rhs,
    trajectory,
)
from .errors import (
    ConfigError,
    ConstraintViolation,
    ConvergenceFailure,
    DomainError,
    InsufficientData,
    InvalidCoupling,
    InvalidDispersion,
    InvalidScheme,
    InvalidSpec,
    NonPositiveEnergy,
    OutOfSupport,
    RabiQuenchError,
)
from .scaling import (
    ConvergenceReport,
    ScalingFit,
    TableRow,
    TableSpec,
    convergence_report,
    default_table_spec,
    fit_power_law,
    log_grid,
    reproduce_table,
)

__version__ = "0.1.0"
