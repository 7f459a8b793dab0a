"""Exception types shared across the package."""


class ParameterError(ValueError):
    """A parameter lies outside the admissible domain of an operation."""


class DegenerateObjectiveError(ValueError):
    """Zero gradient reported together with a positive optimality gap.

    For a convex objective with known optimal value this combination is
    impossible, so it indicates an inconsistent objective definition.
    """


class StepsizeUndefined(RuntimeError):
    """The Polyak ratio is 0/0: the iterate is already optimal."""


class SingularStateError(ValueError):
    """The normalized update map is evaluated where its denominator vanishes."""


class BracketingError(ValueError):
    """A root-finding target lies outside the achievable bracket."""


class ConfigError(ValueError):
    """An experiment configuration failed to parse or validate."""
