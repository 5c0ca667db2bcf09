"""Exception taxonomy shared by the library and the command line tool.

Every error raised on a user-facing path is one of the three classes
below, so callers (and the CLI exit-code mapping) can tell apart bad
configuration, bad input data, and numerical failure.
"""

from __future__ import annotations


class EiskitError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(EiskitError, ValueError):
    """Invalid configuration: bad parameter values, unknown keys, bad flags."""

    exit_code = 2


class DataError(EiskitError, ValueError):
    """Invalid input data: malformed files, non-monotone axes, empty series."""

    exit_code = 3


class NumericalError(EiskitError, ArithmeticError):
    """Numerical failure: non-finite intermediate, singular system, divergence."""

    exit_code = 4


class UnclassifiableError(DataError):
    """An unknown sample whose measurements cannot be classified at all."""
