"""Exception types raised across the package."""


class FactorHDError(Exception):
    """Base class for all package errors."""


class InvalidDimensionError(FactorHDError, ValueError):
    pass


class EmptyInputError(FactorHDError, ValueError):
    pass


class DimensionMismatchError(FactorHDError, ValueError):
    pass


class NonInvertibleUnbinderError(FactorHDError, ValueError):
    """Unbinding with a vector that has zero components."""


class InvalidShapeError(FactorHDError, ValueError):
    pass


class PathNotFoundError(FactorHDError, KeyError):
    pass


class CorruptCodebookError(FactorHDError, ValueError):
    pass


class UnsupportedConfigurationError(FactorHDError, ValueError):
    pass
