"""Shared exception types for the kantor package."""


class KantorError(Exception):
    """Base class for package-specific errors."""


class ParseError(KantorError, ValueError):
    """Malformed input file (.pts or PGM); messages carry line numbers when known."""


class ValidationError(KantorError, ValueError):
    """Problem instance violates a structural requirement (balance, emptiness, ...)."""


class PreconditionError(KantorError, ValueError):
    """An operation was called outside its stated hypotheses."""


class FeasibilityError(KantorError, RuntimeError):
    """Dual variables violate feasibility; signals a bug upstream of the caller."""


class CapExceededError(KantorError, ValueError):
    """Brute-force oracle invoked beyond its tractability cap."""


class SolveError(KantorError, RuntimeError):
    """Solver could not make progress (iteration cap hit, internal inconsistency)."""
