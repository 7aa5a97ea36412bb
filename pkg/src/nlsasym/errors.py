"""Exception hierarchy shared by all modules.

Every numerical failure raised by this package derives from
:class:`NlsasymError` and names the module/operation that failed, so the
command-line driver can report it and exit with a distinct status code.
"""

from __future__ import annotations


class NlsasymError(Exception):
    """Base class for all errors raised by this package."""

    def __init__(self, message: str, module: str = "", operation: str = ""):
        self.module = module
        self.operation = operation
        if module or operation:
            message = f"[{module}.{operation}] {message}"
        super().__init__(message)


class InvalidInputError(NlsasymError):
    """Precondition violation: bad arguments, grids, or configuration."""


class QuadratureError(NlsasymError):
    """An integral did not converge to the requested tolerance."""


class IntegrationAccuracyError(NlsasymError):
    """An ODE/propagator step failed its internal accuracy check."""


class SpectralRangeError(NlsasymError):
    """Requested spectral point is outside what the sampled data supports."""
