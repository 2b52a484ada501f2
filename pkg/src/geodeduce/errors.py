"""Exception hierarchy shared by all engine layers."""


class GeoDeduceError(Exception):
    """Base class for every error raised by this package."""


class StructuralError(GeoDeduceError, ValueError):
    """Polynomials or objects that do not fit together (e.g. variable counts)."""


class DomainError(GeoDeduceError, ValueError):
    """An argument outside the mathematical domain of an operation."""


class ResourceError(GeoDeduceError):
    """A configured work budget was exhausted."""

    def __init__(self, message, stats=None):
        super().__init__(message)
        self.stats = stats


class ConstructionError(GeoDeduceError, ValueError):
    """Ill-formed construction program (undefined label, wrong object kind, ...)."""


class DegeneracyError(GeoDeduceError):
    """Numeric evaluation hit a degenerate configuration."""

    def __init__(self, message, step=None):
        super().__init__(message)
        self.step = step


class NotConstantRelation(GeoDeduceError):
    """The elimination ideal in the ratio variable is zero."""


class InconsistencyError(GeoDeduceError):
    """Symbolic and numeric routes disagree; points at a compilation bug."""


class NotRationalSquare(GeoDeduceError, ValueError):
    pass


class LocusError(GeoDeduceError):
    pass


class ConfigurationError(GeoDeduceError):
    pass


class ParseError(GeoDeduceError):
    """Script syntax or semantic error with a source position."""

    def __init__(self, message, line=0, column=0, expected=()):
        self.message = message
        self.line = line
        self.column = column
        self.expected = tuple(sorted(set(expected)))
        text = f"{line}:{column}: {message}"
        if self.expected:
            text += f" (expected one of: {', '.join(self.expected)})"
        super().__init__(text)
