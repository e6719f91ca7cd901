"""Exception types shared across the toolkit."""


class HistnerError(Exception):
    """Base class for every error raised by histner."""


class DataError(HistnerError, ValueError):
    """Malformed input data. ``line`` is 1-based when known."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = "line %d: %s" % (line, message)
        super().__init__(message)


class BoundaryError(DataError):
    """Ill-formed boundary tag sequence."""


class AlignmentError(DataError):
    """Gold and predicted token streams do not line up."""


class CompileError(DataError):
    """Rule file could not be compiled."""


class ConfigError(HistnerError, ValueError):
    """Invalid configuration value or violated operation precondition."""


class UndefinedRateError(HistnerError, ValueError):
    """A rate was requested over an empty population."""


class RemoteLookupError(HistnerError):
    """A remote registry query failed. Always retryable."""

    retryable = True
