"""Exception hierarchy shared across the package."""


class RabiQuenchError(Exception):
    """Base class for all errors raised by this package."""


class InvalidSpec(RabiQuenchError, ValueError):
    """Quench parameters outside the normal-phase domain (g_final > 1, tau <= 0, ...)."""


class InvalidCoupling(RabiQuenchError, ValueError):
    """Coupling outside [0, 1]."""


class ConstraintViolation(RabiQuenchError):
    """Hyperbolic normalization |u|^2 - |v|^2 = 1 drifted beyond tolerance.

    Signals that the integration step is too coarse for the requested quench.
    """


class InvalidDispersion(RabiQuenchError, ValueError):
    """Disorder dispersion sigma outside the channel's allowed range."""


class OutOfSupport(RabiQuenchError, ValueError):
    """Disorder realization delta outside the channel's support."""


class InvalidScheme(RabiQuenchError, ValueError):
    """Averaging scheme with too few samples or nodes."""


class DomainError(RabiQuenchError, ValueError):
    """Closed-form expression evaluated outside its domain of validity."""


class ConvergenceFailure(RabiQuenchError):
    """Iterative root search exhausted its budget without meeting tolerance."""


class InsufficientData(RabiQuenchError, ValueError):
    """Too few points inside the fit window."""


class NonPositiveEnergy(RabiQuenchError, ValueError):
    """Log-log fit requested on data with non-positive energies."""


class ConfigError(RabiQuenchError, ValueError):
    """Malformed or inconsistent experiment configuration."""
