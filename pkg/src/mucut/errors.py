"""Exception types shared across the package."""


class GraphInputError(ValueError):
    """Malformed external input: graph files, measure files, bad ids."""


class InvariantViolation(AssertionError):
    """An internal guarantee failed; signals a solver or logic bug, not bad input."""
