"""Exception hierarchy shared by all latcoh modules."""


class LatcohError(Exception):
    """Base class for all errors raised by this package."""


class UsageError(LatcohError):
    """Bad input from the caller: dimension mismatch, malformed spec, bad flag."""


class InvalidActionError(UsageError):
    """A matrix that is not a finite-order lattice automorphism of the stated order."""


class ContractViolationError(LatcohError):
    """A documented precondition between modules was violated (e.g. X*Y != 0)."""


class ResourceLimitError(LatcohError):
    """A configured resource cap (free word length, cochain size) was exceeded."""


class InternalInvariantError(LatcohError):
    """An internal consistency check failed; indicates a bug, not bad input."""
