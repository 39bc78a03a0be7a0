"""Exception types shared across the package."""


class CircMaxentError(Exception):
    """Base class for all package errors."""


class BadInput(CircMaxentError):
    """Malformed or out-of-range problem data."""


class AsymmetricRow(BadInput):
    """A scalar circulant first row is not palindromic."""


class NotPositiveDefinite(CircMaxentError):
    """A matrix required to be positive definite failed factorization."""


class NonRealSpectrum(CircMaxentError):
    """Frequency blocks violate conjugate symmetry; no real circulant matches."""


class BandTooWide(CircMaxentError):
    """The band and its circulant mirror overlap; requires N >= 2n + 2."""


class Unstable(CircMaxentError):
    """State matrix has spectral radius >= 1."""


class InfeasibleStart(CircMaxentError):
    """Requested warm start lies outside the dual domain."""


class NoConvergence(CircMaxentError):
    """Iteration budget exhausted before the stopping rule was met."""


class RequiresFullR(CircMaxentError):
    """No positive definite starting completion is available from the band."""
