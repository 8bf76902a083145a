"""Exception types shared across the package."""


class ShapeMismatchError(ValueError):
    """An array's length or layout does not match the declared geometry."""


class NumericalConsistencyError(ArithmeticError):
    """A quantity that must be real (or finite) came back with too much error."""


class DivergenceError(ArithmeticError):
    """An iterative solver produced non-finite values."""


class UninitializedHistoryError(RuntimeError):
    """A dictionary update was requested before any sample entered the history."""


class UndefinedVarianceError(ValueError):
    """Filter variance is undefined for single-entry filters."""


class DataFileError(ValueError):
    """Base class for problems with serialized dictionaries or samples."""


class BadMagicError(DataFileError):
    """The file does not start with the expected magic tag."""


class ChecksumError(DataFileError):
    """The payload checksum does not match the trailer."""


class TruncatedFileError(DataFileError):
    """The file ends before the declared payload and trailer."""
