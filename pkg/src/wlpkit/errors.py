"""Exception hierarchy shared by all wlpkit modules."""


class WlpkitError(Exception):
    """Base class for every error raised by wlpkit."""


class FieldMismatch(WlpkitError):
    pass


class DivisionByZero(WlpkitError, ZeroDivisionError):
    pass


class DegreeTooLarge(WlpkitError):
    pass


class ParseError(WlpkitError):
    def __init__(self, message, line=None, column=None):
        self.message = message
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f" (line {line}" + (f", column {column})" if column is not None else ")")
        super().__init__(message + where)


class InhomogeneousGenerator(ParseError):
    pass


class UnknownVariable(ParseError):
    pass


class Inconclusive(WlpkitError):
    """Raised when a bounded probe could not decide a property."""


class NotArtinian(WlpkitError):
    pass


class NotStabilized(WlpkitError):
    pass


class UndeterminedOverQ(WlpkitError):
    """Random trials over Q found no witness; failure cannot be certified by sampling."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class PreconditionFailed(WlpkitError):
    pass


class NotCompressedAfterRetries(WlpkitError):
    def __init__(self, message, last_hvector=None):
        super().__init__(message)
        self.last_hvector = last_hvector


class InhomogeneousPfaffian(WlpkitError):
    pass


class DependentDualForms(WlpkitError):
    pass


class RequiresInverseSystem(WlpkitError):
    pass


class NotZeroDimensional(WlpkitError):
    pass


class NotSplit(WlpkitError):
    pass


class NotInNormalFormOrbit(WlpkitError):
    pass


class BasePointFound(WlpkitError):
    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class LineNotSplit(WlpkitError):
    pass


class WrongHVector(WlpkitError):
    pass


class NoLinearSyzygies(WlpkitError):
    pass


class StructureMismatch(WlpkitError):
    pass
