"""Exception types shared across the package."""


class FlrtestError(Exception):
    """Base class for errors raised by this package."""


class InvalidInputError(FlrtestError, ValueError):
    """Malformed numeric input (non-finite values, bad shapes, bad parameters)."""


class GridMismatchError(FlrtestError, ValueError):
    """Two grid functions do not live on the same grid."""


class DegenerateDesignError(FlrtestError, ValueError):
    """The boundary matrix is numerically singular beyond the ridge tolerance."""


class DegenerateResponseError(FlrtestError, ValueError):
    """All responses are zero; the likelihood ratio is undefined."""


class DataError(FlrtestError, ValueError):
    """CSV ingestion failed (unparseable file, empty after filtering, bad lag)."""


class NumericError(FlrtestError, RuntimeError):
    """A numerical routine failed to converge."""
