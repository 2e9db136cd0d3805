"""Exception types shared across the package."""


class ConfigError(ValueError):
    """An experiment configuration failed validation.

    The message names the offending field, e.g. ``"interval.t2: must be
    greater than interval.t1"``.
    """


class NumericalError(RuntimeError):
    """A computation failed numerically (eigensolver breakdown, NaN, lost
    identities), as opposed to an invalid input."""
