"""Exception types shared across the package.

Every failure mode that callers are expected to handle gets its own class;
nothing in the library ever papers over a domain violation by returning a
wide interval or a NaN.
"""


class ZetaHarmonicError(Exception):
    """Base class for all library-specific errors."""


class DomainError(ZetaHarmonicError):
    """An argument is outside the mathematical domain of the operation
    (divisor enclosure straddling zero, log of a nonpositive interval,
    height below a required threshold, ...)."""


class InsufficientPrecisionError(ZetaHarmonicError):
    """The requested working precision cannot support the required error
    bound (e.g. a series remainder cannot be pushed below the target)."""


class RefinementError(ZetaHarmonicError):
    """A zero bracket could not be refined to the target radius.  The
    message names the stuck bracket."""

    def __init__(self, message, t_lo=None, t_hi=None):
        super().__init__(message)
        self.t_lo = t_lo
        self.t_hi = t_hi


class CertificationError(ZetaHarmonicError):
    """Completeness certification failed or was inconclusive.  Carries the
    window evidence gathered before the failure."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report or {}


class AmbiguityError(ZetaHarmonicError):
    """A query height lies inside a zero-ordinate enclosure, so a count or
    comparison at that height is not well defined."""


class TableFormatError(ZetaHarmonicError):
    """A zero-table file is malformed.  Carries the offending line number
    when one is known."""

    def __init__(self, message, line_number=None):
        super().__init__(message if line_number is None
                         else f"line {line_number}: {message}")
        self.line_number = line_number
