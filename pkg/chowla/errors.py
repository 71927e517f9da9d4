"""Exception hierarchy shared by every chowla module."""


class LabError(Exception):
    """Base class for all errors raised by the lab."""


class ParameterError(LabError, ValueError):
    """An argument is outside the operation's domain."""


class RangeError(ParameterError):
    """A computation would leave the supported 64-bit integer width."""


class SingularityError(ParameterError):
    """A formula is undefined at the requested point (e.g. f(2))."""


class CacheFormatError(LabError):
    """A binary segment cache file is malformed."""


class AcceptanceError(LabError):
    """One or more report rows failed their acceptance check."""


class ConfigError(LabError):
    """An experiment configuration failed validation.

    ``field`` is the dotted path of the offending entry, e.g. ``"ensemble.k"``.
    """

    def __init__(self, field: str, message: str):
        self.field = field
        self.message = message
        super().__init__(f"{field}: {message}")
