"""Exception taxonomy shared across the package.

The three classes map onto the CLI exit codes: ConfigError -> 2,
RegimeError -> 3, NumericError -> 1.
"""


class ConfigError(ValueError):
    """Invalid or inconsistent configuration (bad parameters, empty grids...)."""


class RegimeError(RuntimeError):
    """Parameters outside the regime where the requested object exists.

    Examples: certified existence hypothesis fails, no traveling kink for
    4*alpha**2 - nu >= 1/3, ansatz discriminant negative.
    """


class NumericError(RuntimeError):
    """A numerical routine failed (divergence, NaN, eigensolver breakdown)."""
