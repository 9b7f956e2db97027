"""Typed errors raised by the solver library.

Every failure mode that a caller can act on gets its own class; nothing is
reported through return codes or silent truncation.
"""


class CkpError(Exception):
    """Base class for all library errors."""


class InvalidParams(CkpError):
    """A precondition on user-supplied parameters is violated."""


class MixedQuadrantBid(InvalidParams):
    """A bid declares demands in both the first and second quadrant."""


class ParseError(CkpError):
    """An instance file does not conform to the JSON schema."""

    def __init__(self, message, path=None):
        self.path = path
        if path:
            message = f"{path}: {message}"
        super().__init__(message)


class GridTooLarge(CkpError):
    """The rounding grid would exceed the configured memory cap."""


class OracleCap(CkpError):
    """A brute-force oracle call exceeds its configured size cap."""


class CombinatorialCap(CkpError):
    """An enumeration would exceed its configured count cap."""


class InternalInconsistency(CkpError):
    """An internal invariant failed; indicates a bug or a known theory gap.

    Raised instead of returning a result that does not satisfy its own
    advertised guarantee.
    """
