"""Exception hierarchy.

Every error raised by the library derives from :class:`WorkExtractionError`,
itself a ``ValueError`` so callers that only care about bad input can catch
the builtin.
"""


class WorkExtractionError(ValueError):
    pass


class CompositionSumMismatch(WorkExtractionError):
    pass


class DomainError(WorkExtractionError):
    pass


class NotNormalized(WorkExtractionError):
    pass


class SupportMismatch(WorkExtractionError):
    pass


class SupportError(SupportMismatch):
    """A population vanishes where a strictly positive one is required."""


class RangeError(WorkExtractionError):
    pass


class NoSolution(WorkExtractionError):
    pass


class TooManyCompositions(WorkExtractionError):
    pass


class OffLattice(WorkExtractionError):
    pass


class IncommensurateSpectrum(WorkExtractionError):
    pass


class BracketFailure(WorkExtractionError):
    pass
