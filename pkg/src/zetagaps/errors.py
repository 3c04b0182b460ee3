"""Exception types shared across the package."""

from __future__ import annotations


class DomainError(ValueError):
    """An argument lies outside the domain of the requested function."""


class SieveSizeError(ValueError):
    """A sieve was requested (or consulted) beyond its configured size."""


class QuadratureError(RuntimeError):
    """Adaptive quadrature ran out of its subdivision budget.

    The best available estimate and its error bound are kept on the
    exception so callers can decide whether the partial answer is usable.
    """

    def __init__(self, message: str, estimate: float, error: float):
        super().__init__(f"{message} (estimate={estimate!r}, error={error!r})")
        self.estimate = estimate
        self.error = error


class BracketError(RuntimeError):
    """No sign change of the threshold function was found in a bracket."""

    def __init__(self, message: str, scanned=None):
        super().__init__(message)
        self.scanned = list(scanned or [])
