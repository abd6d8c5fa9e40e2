"""Exception hierarchy shared by all fairlens modules."""


class FairlensError(Exception):
    """Base class for every error raised by fairlens."""


class ConfigError(FairlensError, ValueError):
    """Invalid configuration value or combination of values."""


class GeometryError(FairlensError, ValueError):
    """Rectangle or image dimensions that do not fit together."""


class NormalizationError(FairlensError, ValueError):
    """A vector with zero norm cannot be unit-normalized."""


class DataError(FairlensError):
    """Unreadable, missing or malformed input data."""


class EmptyInputError(DataError, ValueError):
    pass


class FeatureFileError(DataError, ValueError):
    pass


class DatasetError(DataError):
    pass
