"""Exception types shared across the package."""


class EslError(Exception):
    """Base class for all package-specific errors."""


class InvalidInputError(EslError, ValueError):
    """An argument violates a documented precondition."""


class InitializationError(EslError, RuntimeError):
    """Population initialization could not reach a workable starting state.

    Usually a sign that the data was not normalized before training.
    """


class CsvParseError(EslError, ValueError):
    """A CSV file could not be parsed; the message carries row/column context."""


class ModelSchemaError(EslError, ValueError):
    """A model file is malformed; the message names the offending field."""


class UnsupportedDimensionError(EslError, ValueError):
    """The operation is only defined for a specific ambient dimension."""
