"""Exception types shared across the package.

Everything raised on purpose derives from SphconvError so callers (and the
service layer) can map failures to exit codes / HTTP responses by class.
"""


class SphconvError(Exception):
    """Base class for all deliberate failures in this package."""


class DomainError(SphconvError):
    """An argument is outside the mathematical domain of the operation."""


class RangeError(SphconvError):
    """A parameter is outside the supported (documented) range."""


class PoleError(SphconvError):
    """Evaluation requested at a pole of gamma / cot / sin factors."""


class SingularPointError(SphconvError):
    """Kernel evaluation exactly on the unit sphere, where it blows up."""


class NumericalError(SphconvError):
    """A result failed an internal accuracy assertion (cancellation etc.)."""


class ConvergenceError(SphconvError):
    """An iterative scheme or quadrature failed to reach its tolerance."""


class InsufficientDataError(SphconvError):
    """Too few samples, or too little dynamic range, for a stable fit."""


class DegenerateFitError(SphconvError):
    """All fit samples are numerically zero; no slope is defined."""


class BoundaryError(SphconvError):
    """Grid data does not decay at the cube boundary as required."""


class ResolutionError(SphconvError):
    """Requested feature is too fine (or too coarse) for the grid."""


class EmptyBatteryError(SphconvError):
    """No usable battery member remains after degeneracy skipping."""


class ConfigError(SphconvError):
    """Invalid or missing configuration; message carries the field path."""


class AliasWarning(UserWarning):
    """Spectral content at the Nyquist shell is not negligible."""
