"""Exception hierarchy shared by every layer of the package."""


class StoneCalcError(Exception):
    """Base class for all errors raised by stonecalc."""


class SpaceMismatch(StoneCalcError):
    """Operands live on different Stone spaces."""


class UndefinedArithmetic(StoneCalcError):
    """An atom pairs +inf with -inf under addition or subtraction."""


class NotFinite(StoneCalcError):
    """An element with infinite values was given where a finite one is required."""


class NotSupCompletion(StoneCalcError):
    """An element takes the value -inf, so it is not in the sup-completion."""


class EmptyFamily(StoneCalcError):
    pass


class InvalidInterval(StoneCalcError):
    pass


class InvalidSupport(StoneCalcError):
    pass


class NotMonotone(StoneCalcError):
    """A step sequence fails to be pointwise non-decreasing."""


class CallbackFailure(StoneCalcError):
    """A user-supplied function raised or returned a non-finite value."""


class ArityMismatch(StoneCalcError):
    pass


class MinorantViolation(StoneCalcError):
    """An affine minorant exceeds the convex function at a needed point."""


class InvalidPartition(StoneCalcError):
    pass


class InvalidFiltration(StoneCalcError):
    pass


class NotAdapted(StoneCalcError):
    pass


class InvalidStoppingTime(StoneCalcError):
    pass


class NotIncreasing(StoneCalcError):
    pass


class CommutationFailure(StoneCalcError):
    """A band projection fails to commute with a stage of the filtration."""


class FiltrationMismatch(StoneCalcError):
    pass


class DomainViolation(StoneCalcError):
    pass


class Unbounded(StoneCalcError):
    """A stopping time exceeds the horizon of the process it is applied to."""


class NotIndicatorProcess(StoneCalcError):
    pass


class ConsistencyError(StoneCalcError):
    """Two independent computations of the same quantity disagree."""


class InvalidConfig(StoneCalcError):
    pass
