"""Exception types shared across the package."""


class CiftnError(Exception):
    """Base class for all package-specific errors."""


class NotPositiveDefinite(CiftnError):
    """Banded Cholesky factorization failed.

    Signals a (tau, alpha, isi_len, block_len) combination outside the range
    where the truncated Gram matrix admits an exact noise factorization.  The
    matrix itself is still usable for the signal model; only colored-noise
    generation and zero-forcing require the factor.
    """


class NotInvertible(CiftnError):
    """A linear solve against the Gram matrix is not available."""


class OddLength(CiftnError):
    """Coordinate interleaving requires an even number of symbols."""


class DimensionMismatch(CiftnError):
    """Vector/matrix dimensions do not agree."""


class IndexOutOfRange(CiftnError):
    """Requested symbol or component index is outside the frame."""


class TooLarge(CiftnError):
    """Exhaustive search requested beyond its enumeration cap."""


class LengthMismatch(CiftnError):
    """Bit vector length does not match the code dimension."""


class ConfigInvalid(CiftnError):
    """Simulation configuration failed validation."""
