"""Exception hierarchy shared across the package.

The CLI maps these onto process exit codes: configuration problems exit
with 2, data/parsing problems with 3 and numerical failures with 4.
"""


class WarpdepthError(Exception):
    """Base class for all package-specific errors."""


class DomainError(WarpdepthError, ValueError):
    """Evaluation point outside the curve's observation interval."""


class DegenerateCurveError(WarpdepthError, ValueError):
    """A curve is flat (or all-zero) where a non-degenerate one is required."""


class DataError(WarpdepthError, ValueError):
    """Malformed input data: ragged panels, bad headers, unfillable gaps."""


class ConfigError(WarpdepthError, ValueError):
    """Invalid configuration value or combination."""
