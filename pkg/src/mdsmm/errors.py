"""Exception types shared across the package."""


class MdsmmError(Exception):
    """Base class for all package-specific errors."""


class DimensionError(MdsmmError, ValueError):
    """Shapes or lengths of operands do not conform."""


class InputError(MdsmmError, ValueError):
    """An argument value is outside its documented domain."""


class ParseError(MdsmmError, ValueError):
    """A file could not be parsed; carries the offending location."""

    def __init__(self, message, path=None, line=None):
        self.path = path
        self.line = line
        where = ""
        if path is not None:
            where += f"{path}"
        if line is not None:
            where += f":{line}"
        super().__init__(f"{where}: {message}" if where else message)


class StratificationError(MdsmmError, ValueError):
    """A label has too few samples to stratify into the requested folds."""


class InfeasibleBoundError(MdsmmError, ValueError):
    """The requested bound is vacuous for the given inputs (e.g. the
    effective confidence level is not positive)."""


class PowerIterationError(MdsmmError, RuntimeError):
    """Power iteration failed to converge; carries the last iterate."""

    def __init__(self, message, last_iterate=None, last_estimate=None):
        self.last_iterate = last_iterate
        self.last_estimate = last_estimate
        super().__init__(message)
