"""Exception hierarchy shared across the package.

The CLI maps these onto process exit codes (config 2, data 3, numerical 4),
so library code should raise the most specific class that applies.
"""


class ShrinkregError(Exception):
    """Base class for all package-specific errors."""


class ConfigError(ShrinkregError, ValueError):
    """Invalid or inconsistent configuration (flags, specs, parameters)."""


class DataError(ShrinkregError, ValueError):
    """Defective input data (missing values, ragged rows, constant columns)."""


class NumericalError(ShrinkregError, RuntimeError):
    """Numerical failure (rank deficiency, exact collinearity, singularity)."""
