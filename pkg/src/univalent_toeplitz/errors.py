"""Exception types raised across the package."""


class ToeplitzError(Exception):
    """Base class for all package errors."""


class DivisionByZeroLeadingTerm(ToeplitzError, ZeroDivisionError):
    pass


class EvalRadiusExceeded(ToeplitzError, ValueError):
    pass


class InvalidMeasure(ToeplitzError, ValueError):
    pass


class AlphaOutOfRange(ToeplitzError, ValueError):
    pass


class UnknownFunctionId(ToeplitzError, KeyError):
    pass


class InsufficientTruncation(ToeplitzError, ValueError):
    pass


class UnknownFunctional(ToeplitzError, KeyError):
    pass


class LambdaBelowThreshold(ToeplitzError, ValueError):
    pass


class DomainError(ToeplitzError, ValueError):
    pass


class ParamOutOfRange(ToeplitzError, ValueError):
    pass


class UnknownLemmaId(ToeplitzError, KeyError):
    pass


class BudgetExceeded(ToeplitzError, RuntimeError):
    pass


class UnknownExperimentId(ToeplitzError, KeyError):
    pass


class SpecError(ToeplitzError, ValueError):
    """Malformed function description or manifest."""
