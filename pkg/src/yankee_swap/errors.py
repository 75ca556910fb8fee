"""Exception hierarchy shared by all modules."""


class YankeeSwapError(Exception):
    """Base class for errors raised by this package."""


class InstanceError(YankeeSwapError, ValueError):
    """Malformed instance data: bad good ids, inconsistent valuation specs."""


class ValidationError(InstanceError):
    """An instance failed validation; ``problems`` lists every issue found."""

    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


class PreconditionError(YankeeSwapError, ValueError):
    pass


class TooLargeError(YankeeSwapError):
    """Refusal to brute-force a ground set beyond the configured limit."""


class QueryLimitExceeded(YankeeSwapError):
    pass


class CriterionError(YankeeSwapError, ValueError):
    pass


class InvariantError(AssertionError):
    """A programming error: an internal invariant does not hold."""
