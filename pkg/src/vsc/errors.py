"""Exception hierarchy shared by every module of the package."""


class VscError(Exception):
    """Base class for all errors raised by :mod:`vsc`."""


class DimensionError(VscError, ValueError):
    """Empty input or incompatible array shapes."""


# shape errors and dimension errors are the same thing from a caller's view
ShapeError = DimensionError


class SingularMatrixError(VscError, ArithmeticError):
    """A factorization met a non-positive pivot."""


class NumericalError(VscError, ArithmeticError):
    """A solve produced a residual outside its accuracy bound."""


class ClassMissingError(VscError, ValueError):
    """A label class needed for pair sampling has no samples."""


class DegeneracyError(VscError, ValueError):
    """A pair of points is (numerically) coincident."""


class ParameterError(VscError, ValueError):
    """An argument is outside its admissible range."""


class ParseError(VscError, ValueError):
    """Malformed dataset file.  ``line`` is 1-based when known."""

    def __init__(self, message, line=None, column=None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if column is not None:
            where.append(f"column {column!r}")
        if where:
            message = f"{message} ({', '.join(where)})"
        super().__init__(message)
        self.line = line
        self.column = column


class UnsupportedFeatureError(ParseError):
    """A dataset declares an input attribute that cannot be used (categorical)."""


class FoldError(VscError):
    """Wraps an error raised while evaluating one cross-validation fold."""

    def __init__(self, fold, cause):
        super().__init__(f"fold {fold}: {type(cause).__name__}: {cause}")
        self.fold = fold
        self.cause = cause
