"""Exception types shared across the toolkit.

Two tiers matter for the command-line surface: :class:`ValidationError`
covers everything caused by bad input (exit code 2), while
:class:`ComputationError` covers numerical procedures that failed on
legitimate input (exit code 1).
"""


class SdecError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(SdecError):
    """An input violated a documented precondition."""


class ComputationError(SdecError):
    """A numerical procedure failed to produce a usable result."""


# --- shape / value validation -------------------------------------------------

class NonFinite(ValidationError):
    """An array contains NaN or Inf entries."""


class ZeroMatrix(ValidationError):
    """An operation that needs a nonzero matrix received an all-zero one."""


class ShapeNotTwoDim(ValidationError):
    """A matrix argument is not two-dimensional with at least one row and column."""


class DimensionMismatch(ValidationError):
    """Two operands disagree on the ambient dimension."""


class LengthMismatch(ValidationError):
    """Two vectors that must align entry-by-entry have different lengths."""


class NotOrthonormal(ValidationError):
    """A claimed orthonormal basis fails the Gram check."""


class NotProjector(ValidationError):
    """A claimed orthogonal projector is not symmetric idempotent."""


class NotNested(ValidationError):
    """A projector that must be dominated by another one is not."""


class NonDisjoint(ValidationError):
    """Two subspaces that must be disjoint share a direction."""


class InfeasibleSpec(ValidationError):
    """Requested subspace dimensions do not fit in the ambient space."""


class SliceOverlap(ValidationError):
    """Row ranges that must partition a matrix overlap or leave gaps."""


class QueryNotInId(ValidationError):
    """The query row must come from the identity block."""


class NegativeExcursion(ValidationError):
    """Excursion magnitudes must be nonnegative."""


class MissingProfile(ValidationError):
    """The requested ranking criterion needs a stored excursion profile."""


# --- array file format --------------------------------------------------------

class BadMagic(ValidationError):
    """The file is not parseable as NPY version 1.0."""


class UnsupportedDtype(ValidationError):
    """Only little-endian float32 / float64 payloads are accepted."""


class FortranOrderUnsupported(ValidationError):
    """Column-major payloads are not accepted."""


class TruncatedFile(ValidationError):
    """The payload size does not match the declared shape."""


class IoError(ValidationError):
    """A file could not be read or written."""


# --- numerical procedures -----------------------------------------------------

class ConvergenceFailure(ComputationError):
    """An iterative factorization did not converge."""


class Diverged(ComputationError):
    """The optimizer's loss exploded past the divergence guard."""
