"""Exception hierarchy shared by all modules."""


class FormalSplitError(Exception):
    """Base class for every error raised by this package."""


class DivisionByZero(FormalSplitError, ZeroDivisionError):
    pass


class IncompatibleOrders(FormalSplitError):
    pass


class NeedsExtension(FormalSplitError):
    """A root lies outside the supported cyclotomic tower."""


class DimensionMismatch(FormalSplitError):
    pass


class TruncationLoss(FormalSplitError):
    pass


class TruncationInsufficient(FormalSplitError):
    """The available precision cannot decide the question."""


class ZeroSeries(FormalSplitError):
    pass


class NotAUnit(FormalSplitError):
    pass


class NotDivisible(FormalSplitError):
    pass


class CoefficientNotInvertible(FormalSplitError):
    pass


class NonzeroConstantTerm(FormalSplitError):
    pass


class DegenerateLinearPart(FormalSplitError):
    pass


class IndexOutOfRange(FormalSplitError, IndexError):
    pass


class NotOrderK(FormalSplitError):
    pass


class MultipleWVariables(FormalSplitError):
    pass


class NotReduced(FormalSplitError):
    pass


class NotAProductOfLinearForms(FormalSplitError):
    pass


class SeedsNotDistinct(FormalSplitError):
    pass


class PoleFound(FormalSplitError):
    """A lifted root has negative powers of w in the current frame."""


class NotClosedUnderAction(FormalSplitError):
    pass


class NotNormalizable(FormalSplitError):
    pass


class InvalidParams(FormalSplitError, ValueError):
    pass
