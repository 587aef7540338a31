"""Exception types shared across the toolkit."""


class DomainError(ValueError):
    """An input lies outside the mathematical domain of an operation."""


class ConfigError(ValueError):
    """A configuration file is missing a field or holds an invalid value."""

    def __init__(self, field, message):
        self.field = field
        super().__init__(f"{field}: {message}")


class WavParseError(ValueError):
    """A RIFF/WAVE stream could not be decoded.

    ``offset`` is the byte position in the stream where decoding failed.
    """

    def __init__(self, message, offset):
        self.offset = offset
        super().__init__(f"{message} (at byte offset {offset})")
