"""Exception hierarchy shared by all modules."""


class RankOneError(ValueError):
    """Base class for every error raised by this package."""


class PoleError(RankOneError):
    """A Gamma-function pole was hit."""


class ConvergenceError(RankOneError):
    """A series failed to reach the requested tolerance."""


class GridError(RankOneError):
    """A grid is too coarse or otherwise invalid for the requested operation."""


class KTypeError(RankOneError):
    """The (r, s) parameters do not describe a K-type admitted by the space."""


class StripError(RankOneError):
    """A spectral parameter lies outside the admissible strip."""


class TailTruncationError(RankOneError):
    """The truncated part of an integral is not negligible."""


class SupportError(RankOneError):
    """Spectral data is not supported where it claims to be."""


class PreconditionError(RankOneError):
    """A documented precondition of an operation is violated."""


class HypothesisError(RankOneError):
    """External data fails the structural hypotheses required for reconstruction."""


class DegenerateColumnError(RankOneError):
    """No admissible evaluation point was found for a projection-field column."""
