"""Exception hierarchy shared by every module of the package."""


class ContactTripleError(Exception):
    """Base class for all package errors."""


class NotInOverlap(ContactTripleError):
    """A coordinate transition was requested at a point outside the chart overlap."""


class ChartMismatch(ContactTripleError):
    pass


class BasePointMismatch(ContactTripleError):
    pass


class ExprSyntaxError(ContactTripleError):
    """Malformed expression text.

    ``position`` is the 0-based character offset where parsing failed and
    ``expected`` the set of token kinds that would have been accepted there.
    """

    def __init__(self, message, position, expected=()):
        self.position = position
        self.expected = frozenset(expected)
        detail = f" (expected one of: {', '.join(sorted(self.expected))})" if self.expected else ""
        super().__init__(f"{message} at position {position}{detail}")


class UnknownSymbol(ContactTripleError):
    def __init__(self, name):
        self.name = name
        super().__init__(f"unknown symbol {name!r}")


class DomainError(ContactTripleError, ArithmeticError):
    """Evaluation left the domain of an elementary function (log of a negative, 1/0, ...)."""


class NumericalError(ContactTripleError):
    """Base for failures of the numerical machinery (exit status 2 in the CLI)."""


class SingularHessian(NumericalError):
    def __init__(self, message, condition=float("inf")):
        self.condition = condition
        super().__init__(message)


class NoConvergence(NumericalError):
    def __init__(self, residual, iterations):
        self.residual = residual
        self.iterations = iterations
        super().__init__(f"Newton iteration did not converge after {iterations} steps (residual {residual:.3e})")


class NotHyperregular(SingularHessian):
    """The Legendre map of a section is degenerate on the probed region."""

    def __init__(self, message, diagnostics=None):
        self.diagnostics = diagnostics
        cond = diagnostics.sampled_condition_max if diagnostics is not None else float("inf")
        super().__init__(message, cond)


class StepUnderflow(NumericalError):
    pass


class ChartExhausted(NumericalError):
    pass


class ConfigError(ContactTripleError):
    def __init__(self, message, field=None):
        self.field = field
        super().__init__(f"{field}: {message}" if field else message)
