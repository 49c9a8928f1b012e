"""Exception and warning types shared across the package."""


class ExceptionalPointError(ArithmeticError):
    """Two resonances (and their eigenvectors) coalesce, or nearly so.

    Raised when a requested quantity is ill-defined because the eigensystem
    is at (or numerically indistinguishable from) an eigenvalue branching
    point, where eigenvectors become self-orthogonal and biorthogonal
    normalization diverges.
    """


class SmallDenominatorError(ArithmeticError):
    """An energy denominator fell below the configured separation tolerance."""


class MatchingError(RuntimeError):
    """Resonance trajectories could not be tracked unambiguously."""


class ExceptionalPointWarning(UserWarning):
    """A computed configuration sits within tolerance of a branching point."""


class MatchingAmbiguityWarning(UserWarning):
    """Two resonance assignments have nearly identical total cost."""


class TruncationWarning(UserWarning):
    """A truncated spectral sum is estimated to bias the result noticeably."""
