"""Exception hierarchy for kmwave."""


class KmwaveError(Exception):
    """Base class for all kmwave errors."""


class InvalidFieldError(KmwaveError):
    """Input grid field violates an invariant (non-finite values, bad size)."""


class CorruptedSpectrumError(KmwaveError):
    """Spectrum fails Hermitian symmetry beyond tolerance."""


class ConfigurationError(KmwaveError):
    """Operator/field size mismatch or invalid scenario configuration."""


class QuadratureFailureError(KmwaveError):
    """Principal-value quadrature did not reach the requested tolerance.

    Carries the best estimate achieved in ``estimate``.
    """

    def __init__(self, message, estimate=None, error=None):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


class CalibrationError(KmwaveError):
    """Kernel calibration residual exceeded tolerance or grid too coarse."""


class DomainError(KmwaveError):
    """Argument outside the mathematical domain of an operation."""
