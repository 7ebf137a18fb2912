"""Exception types shared across the package."""


class SparseRankError(Exception):
    """Base class for all errors raised by this package."""


class FormatError(SparseRankError):
    """A file failed to parse under its declared format.

    The message carries ``path:line:`` context where available.
    """


class ZeroMeanDegreeError(SparseRankError):
    """A degree distribution with mean 0 was passed where edges are required."""


class InconsistentMeansError(SparseRankError):
    """In- and out-degree distributions disagree on the mean degree."""


class NotRepresentableError(SparseRankError):
    """A matrix value cannot be mapped into the finite field at the declared precision."""


class GenerationError(SparseRankError):
    """A random-matrix generator could not satisfy its specification."""
