"""Exception types shared across the package.

ConfigError covers bad user input (malformed config files, invalid
parameter combinations, domain violations); NumericalError covers
solver failures (lost brackets, non-convergent quadrature, complex
contamination of spectra).  The CLI maps them to exit codes 2 and 3.
"""


class ConfigError(ValueError):
    """Invalid configuration or argument domain."""


class NumericalError(RuntimeError):
    """A solver failed to converge or produced inconsistent results."""
