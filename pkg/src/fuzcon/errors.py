"""Exception hierarchy shared by every fuzcon module."""


class FuzconError(Exception):
    """Base class for all library errors."""


class DSLSyntaxError(FuzconError, SyntaxError):
    """Malformed connective source.

    ``position`` is the 0-based character offset of the offending token and
    ``expected`` a short description of what the parser wanted there.
    """

    def __init__(self, message, source="", position=0, expected=""):
        self.source = source
        self.position = position
        self.expected = expected
        detail = f"{message} at position {position}"
        if expected:
            detail += f" (expected {expected})"
        super().__init__(detail)


class CoverageError(FuzconError, ValueError):
    """A piecewise expression leaves some domain point without a branch."""


class RangeError(FuzconError, ValueError):
    """An expression produced a value outside [0, 1]."""


class ArityMismatch(FuzconError, ValueError):
    pass


class KindMismatch(FuzconError, TypeError):
    pass


class NotValidated(FuzconError, ValueError):
    """A connective failed the validation its use requires."""


class NotMonotone(FuzconError, ValueError):
    pass


class ConstantFunction(FuzconError, ValueError):
    pass


class NotContinuousNegation(FuzconError, ValueError):
    pass


class InvalidNegation(FuzconError, ValueError):
    pass


class AxiomsFailed(FuzconError, ValueError):
    pass


class SignatureMismatch(FuzconError, TypeError):
    pass


class UnknownTheorem(FuzconError, KeyError):
    pass


class UnknownTarget(FuzconError, KeyError):
    pass


class UnknownName(FuzconError, KeyError):
    pass


class CatalogCorrupt(FuzconError, RuntimeError):
    pass


class PostconditionError(FuzconError, AssertionError):
    """A guaranteed property of a construction did not hold numerically."""
