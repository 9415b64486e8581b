"""Exception hierarchy shared by every module."""


class StoneError(Exception):
    """Base class for all errors raised by this package."""


class BoundExceeded(StoneError):
    """A construction escaped the bounded finite universe it lives in."""


class DepthExceeded(BoundExceeded):
    """A term monad bind produced a term deeper than the configured bound."""


class CompositionUndefined(BoundExceeded):
    """A composite of morphisms lies outside a truncated category."""


class SearchSpaceTooLarge(StoneError):
    pass


class NormalizerUnsound(StoneError):
    pass


class TheoryNotFree(StoneError):
    pass


class Unsupported(StoneError):
    pass


class LawViolation(StoneError):
    """Raised by ``LawReport.require`` when a verdict failed."""

    def __init__(self, report, message=None):
        self.report = report
        super().__init__(message or report.summary())


class EquationViolated(LawViolation):
    pass


class AxiomViolation(LawViolation):
    pass


class CategoryLawViolation(LawViolation):
    pass


class BoundMismatch(LawViolation):
    pass


class BoundInsufficient(LawViolation):
    pass


class NoDecomposition(StoneError):
    pass


class NonUnique(StoneError):
    def __init__(self, count):
        self.count = count
        super().__init__(f"{count} hyperaffine decompositions found")
