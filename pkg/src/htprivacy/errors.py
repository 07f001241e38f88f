"""Exception hierarchy.

Every error raised by the library derives from :class:`HtPrivacyError`.
Input-shaped problems additionally derive from :class:`ValueError`;
numerical breakdowns derive from :class:`NumericalFailure` so the CLI can
map them to a distinct exit code.
"""


class HtPrivacyError(Exception):
    """Base class for all library errors."""


class InvalidInput(HtPrivacyError, ValueError):
    """Base class for errors caused by malformed or out-of-contract input."""


class NotHermitian(InvalidInput):
    pass


class NotPSD(InvalidInput):
    pass


class DimensionMismatch(InvalidInput):
    pass


class DimensionOverflow(InvalidInput):
    pass


class ZeroVector(InvalidInput):
    pass


class OutOfRange(InvalidInput):
    pass


class NotDensity(InvalidInput):
    pass


class NotTracePreserving(InvalidInput):
    pass


class EmptyRelation(InvalidInput):
    pass


class DeltaNotZero(InvalidInput):
    pass


class ZeroMixing(InvalidInput):
    pass


class WrongMode(InvalidInput):
    pass


class NumericalFailure(HtPrivacyError):
    """A solver could not meet its accuracy contract."""


class NoConvergence(NumericalFailure):
    pass


class InfeasibleTolerance(NumericalFailure):
    pass


class ParseError(InvalidInput):
    """Malformed input document syntax."""


class ValidationError(InvalidInput):
    """A well-formed document violates a state or channel invariant."""


class SinkError(HtPrivacyError):
    """Output could not be written."""
