"""Exception hierarchy shared by all ndsplit modules."""


class NdsplitError(Exception):
    """Base class for every error raised by this package."""


class InvalidArgumentError(NdsplitError, ValueError):
    pass


class InvalidProfileError(NdsplitError, ValueError):
    pass


class ProfileParseError(InvalidProfileError):
    """Raised when a profile file does not match the JSON schema.

    ``path`` is a dotted/indexed location such as ``layers[3].weight_bytes``.
    """

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


class ConfigError(NdsplitError, ValueError):
    pass


class IncompleteIterationError(NdsplitError):
    pass


class FramingError(NdsplitError):
    def __init__(self, message: str, offset: int):
        self.offset = offset
        super().__init__(f"{message} (at byte offset {offset})")


class NotFoundError(NdsplitError, KeyError):
    def __str__(self) -> str:
        return str(self.args[0]) if self.args else "not found"


class IterationFailedError(NdsplitError):
    def __init__(self, ordinal: int, reason: str):
        self.ordinal = ordinal
        self.reason = reason
        super().__init__(f"request ordinal {ordinal} failed: {reason}")
