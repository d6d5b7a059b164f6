"""Exception hierarchy shared by every module."""


class GWitnessError(Exception):
    """Base class for all package errors."""


class ValidationError(GWitnessError, ValueError):
    """Malformed input: bad layout, bad state, bad scenario field."""

    def __init__(self, message, pointer=None):
        super().__init__(message)
        self.pointer = pointer

    def __str__(self):
        msg = super().__str__()
        if self.pointer is not None:
            return f"{self.pointer}: {msg}"
        return msg


class LayoutMismatchError(ValidationError):
    """Two operators defined over different site layouts were combined."""


class NumericalError(GWitnessError, ArithmeticError):
    """A numerical routine failed: non-convergence, lost unitarity, etc."""
