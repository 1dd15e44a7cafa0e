"""Exception hierarchy for optclean."""


class CleaningError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(CleaningError, ValueError):
    """A quote or configuration violates a field invariant.

    When raised by the reader, ``issues`` holds one entry per offending row.
    """

    def __init__(self, message, issues=None):
        super().__init__(message)
        self.issues = list(issues or [])


class NegativeField(ValidationError):
    pass


class ZeroMaturity(ValidationError):
    pass


class InsufficientPoints(CleaningError, ValueError):
    pass


class SingularDesign(CleaningError, ValueError):
    pass


class DegenerateResiduals(CleaningError, ValueError):
    pass


class OutOfDomain(CleaningError, ValueError):
    pass


class ParseError(CleaningError, ValueError):
    def __init__(self, message, row=None, column=None):
        loc = []
        if row is not None:
            loc.append(f"row {row}")
        if column is not None:
            loc.append(f"column {column!r}")
        super().__init__(f"{message} ({', '.join(loc)})" if loc else message)
        self.row = row
        self.column = column


class NonPositivePrice(CleaningError, ValueError):
    pass


class TooShort(CleaningError, ValueError):
    pass


class SpecInfeasible(CleaningError, ValueError):
    pass


class TooManyInjections(CleaningError, ValueError):
    pass
