__all__ = [
    "CogError",
    "DomainError",
    "ParseError",
    "InvalidMaterial",
    "ToleranceNotMet",
    "NonFinite",
    "NoBracket",
    "SchemaError",
    "ValidationError",
    "UnknownParam",
]


class CogError(Exception):
    """Base class for every error raised by this package."""

    def __init__(self, msg):
        super().__init__(msg)
        self.msg = msg


class DomainError(CogError, ValueError):
    """An argument lies outside the domain of the operation."""


class InvalidMaterial(DomainError):
    """Both densities are zero (or one of them is negative)."""


class ParseError(CogError):
    """Malformed profile expression.

    Args:
        offset (int): byte offset of the offending token.
        expected (iterable): tokens that would have been accepted there.
    """

    def __init__(self, msg, offset, expected=()):
        self.offset = offset
        self.expected = frozenset(expected)
        if self.expected:
            msg = f"{msg} at offset {offset} (expected one of: {', '.join(sorted(self.expected))})"
        else:
            msg = f"{msg} at offset {offset}"
        super().__init__(msg)


class ToleranceNotMet(CogError):
    """A numerical method ran out of budget before reaching its tolerance."""

    def __init__(self, msg, value=None, estimate=None):
        super().__init__(msg)
        self.value = value
        self.estimate = estimate


class NonFinite(CogError, ArithmeticError):
    """An integrand or objective returned inf/nan at an interior sample."""


class NoBracket(CogError):
    """The root-finding bracket does not change sign."""


class SchemaError(CogError):
    """A scenario file does not match the schema.

    Args:
        path (str): dotted path of the offending field, e.g. ``points[3]``.
    """

    def __init__(self, path, msg):
        self.path = path
        super().__init__(f"{path}: {msg}" if path else msg)


class ValidationError(CogError):
    """A scenario is well-formed but violates a declared invariant."""

    def __init__(self, invariant, msg):
        self.invariant = invariant
        super().__init__(f"{msg} (invariant: {invariant})")


class UnknownParam(CogError, KeyError):
    """A sweep names a parameter the scenario does not have."""

    def __str__(self):
        return self.msg
