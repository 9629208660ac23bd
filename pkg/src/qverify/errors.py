"""Exception hierarchy shared by every module."""


class QVerifyError(Exception):
    """Base class for all library errors."""


class DomainError(QVerifyError, ValueError):
    pass


class ExactModeUnsupported(QVerifyError):
    """Raised when an infinite object is requested in rational arithmetic."""


class DenominatorPole(QVerifyError, ZeroDivisionError):
    pass


class NoConvergence(QVerifyError, ArithmeticError):
    def __init__(self, msg, partial=None, terms_used=0):
        super().__init__(msg)
        self.partial = partial
        self.terms_used = terms_used


class UnknownIdentity(QVerifyError, KeyError):
    def __str__(self):
        return f"unknown identity {self.args[0]!r}"


class EvaluationError(QVerifyError):
    """Wraps a lower-level failure while evaluating one side of an identity."""

    def __init__(self, side, cause):
        super().__init__(f"{side}: {type(cause).__name__}: {cause}")
        self.side = side
        self.cause = cause
