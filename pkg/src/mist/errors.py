"""Exception types shared across the package."""


class MistError(Exception):
    """Base class for all package-specific errors."""


class InvalidInputError(MistError, ValueError):
    """A caller supplied a value outside an operation's domain."""


class EmptySketchError(MistError):
    """A rank/quantile query hit a sketch with no items."""


class EmptyLeafError(MistError):
    """A prediction was requested from a leaf with no class mass."""


class InvalidSplitError(MistError, ValueError):
    """A split candidate produced an empty child."""


class ConfigError(MistError, ValueError):
    """An experiment or stream configuration is inconsistent."""


class DataError(MistError, ValueError):
    """External data (CSV input) failed to parse or match its schema."""
