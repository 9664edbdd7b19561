"""Exception types raised across the package."""


class TrekCalcError(Exception):
    """Base class for all errors raised by trekcalc."""


class CycleError(TrekCalcError, ValueError):
    """The edge set contains a directed cycle."""


class UnknownVertexError(TrekCalcError, KeyError):
    pass


class InvalidQueryError(TrekCalcError, ValueError):
    pass


class SizeMismatchError(TrekCalcError, ValueError):
    pass


class DegreeTooHighError(TrekCalcError, ValueError):
    """A variable occurs with exponent >= 2 where linearity was required."""


class NotDivisibleError(TrekCalcError, ArithmeticError):
    pass


class CancellationError(TrekCalcError, AssertionError):
    """Two trek systems with the same weight carried opposite signs."""


class HypothesisUnmetError(TrekCalcError, ValueError):
    """The preconditions of a lemma check are not satisfied."""


class ConditionUnmetError(TrekCalcError, ValueError):
    """The nonsingularity condition does not hold for the query."""


class ZeroPolynomialError(TrekCalcError, ValueError):
    """The partial correlation numerator vanishes identically."""


class VerificationFailedError(TrekCalcError, AssertionError):
    pass


class DegenerateDenominatorError(TrekCalcError, ZeroDivisionError):
    pass


class NonPositiveDefiniteError(TrekCalcError, ValueError):
    pass


class TooFewSamplesError(TrekCalcError, ValueError):
    pass


class TailSwapError(TrekCalcError, ValueError):
    pass


class NegativeOmegaError(TrekCalcError, ValueError):
    pass


class ModelParseError(TrekCalcError, ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
