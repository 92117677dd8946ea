"""Exception hierarchy shared by all knotorder modules."""


class KnotOrderError(Exception):
    """Base class for every error raised by this package."""


class SingularMatrix(KnotOrderError, ValueError):
    pass


class NotSymmetric(KnotOrderError, ValueError):
    pass


class NotNegativeDefinite(KnotOrderError, ValueError):
    pass


class BadIndex(KnotOrderError, ValueError):
    pass


class NotCoprime(KnotOrderError, ValueError):
    pass


class BadTwistCount(KnotOrderError, ValueError):
    pass


class NoSymmetricLabeling(KnotOrderError):
    """No translation of the labels makes the table invariant under x -> -x."""


class GroupMismatch(KnotOrderError, ValueError):
    pass


class UnsupportedDeterminant(KnotOrderError):
    pass


class UnsupportedType(KnotOrderError):
    pass


class ParseError(KnotOrderError):
    def __init__(self, message, line=None, field=None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field {field!r}")
        if where:
            message = f"{message} ({', '.join(where)})"
        super().__init__(message)
        self.line = line
        self.field = field


class ValidationError(KnotOrderError):
    pass


class PresentationUnavailable(KnotOrderError):
    pass
