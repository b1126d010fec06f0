"""Exception types shared across the package."""


class FieldPathError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(FieldPathError):
    """Syntax error in an expression string.

    Carries the byte offset of the failure and a description of what was
    expected there.
    """

    def __init__(self, message, offset, expected=None):
        self.offset = offset
        self.expected = expected
        detail = f"at offset {offset}: {message}"
        if expected:
            detail += f" (expected {expected})"
        super().__init__(detail)


class EvaluationError(FieldPathError):
    """Expression could not be evaluated to a finite real."""


class UnboundVariableError(EvaluationError):
    """A free variable had no value in the assignment."""

    def __init__(self, name):
        self.name = name
        super().__init__(f"unbound variable {name!r}")


class DomainError(EvaluationError):
    """Evaluation left the real domain (log/sqrt of a negative, division
    by zero, 0^negative, overflow)."""


class DimensionError(FieldPathError):
    """Dimensions of two objects do not match."""


class IntegrationError(FieldPathError):
    """ODE integration blew up before reaching the end of the span."""

    def __init__(self, message, last_good_t):
        self.last_good_t = last_good_t
        super().__init__(f"{message} (last good t = {last_good_t})")


class ConvergenceError(FieldPathError):
    """A limit procedure failed to converge (signals a discontinuity)."""


class NondifferentiableError(FieldPathError):
    """An element of a general function is not differentiable on its region."""


class RegionError(FieldPathError):
    """Invalid region, or a point outside the region of an element."""


class FilterError(FieldPathError):
    """Invalid filter input: empty generator, carrier mismatch, or a family
    too large for exhaustive checking."""
