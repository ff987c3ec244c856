"""Exception hierarchy shared by all modules."""


class HankelDirichletError(Exception):
    """Base class for every error raised by this package."""


class DivisorContainsZero(HankelDirichletError, ZeroDivisionError):
    pass


class LogOfNonpositiveBall(HankelDirichletError, ValueError):
    pass


class PrecisionExhausted(HankelDirichletError):
    """Raised when a query cannot be resolved below the configured max_bits."""


class TailDiverges(HankelDirichletError, ValueError):
    pass


class InvalidSeries(HankelDirichletError, ValueError):
    pass


class FewerThanTwoNonzero(HankelDirichletError, ValueError):
    pass


class EnvelopeViolated(HankelDirichletError):
    pass


class EnvelopeDomainViolated(HankelDirichletError, ValueError):
    pass


class PivotContainsZero(HankelDirichletError, ZeroDivisionError):
    pass


class NotRationalSeries(HankelDirichletError, TypeError):
    pass


class NotDirichletKind(HankelDirichletError, TypeError):
    pass


class InteriorDeterminantUnresolved(HankelDirichletError):
    pass


class NotAnInteger(HankelDirichletError, AssertionError):
    """D^n * H failed to be an integer; indicates an implementation bug."""
