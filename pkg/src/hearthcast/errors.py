"""Exception hierarchy shared across the package."""


class HearthcastError(Exception):
    """Base class for all package errors."""


class DataError(HearthcastError, ValueError):
    """Invalid data: bad CSV contents, invalid record fields, empty inputs."""


class SchemaError(DataError):
    """A file's structure does not match the published schema (missing columns, bad header)."""


class InsufficientWindowError(DataError):
    """Meter reading window too short to annualize (fewer than the minimum days)."""


class ConfigError(HearthcastError, ValueError):
    """Invalid configuration values."""


class NotFittedError(HearthcastError, RuntimeError):
    """A model was used before fit() or loading."""
