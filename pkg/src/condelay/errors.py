"""Exception and warning types shared across the package."""


class CondelayError(Exception):
    """Base class for all condelay errors."""


# --- topology / graph validation ---

class TopologyError(CondelayError):
    """Invalid adjacency matrix."""


class NonSquareError(TopologyError):
    pass


class AsymmetricError(TopologyError):
    pass


class NonzeroDiagonalError(TopologyError):
    pass


class NegativeWeightError(TopologyError):
    pass


class DecompositionFailedError(CondelayError):
    """The symmetric eigensolver failed or produced a non-orthogonal basis."""


class DisconnectedError(CondelayError):
    """The communication graph is not connected; consensus analysis refused."""


class DimensionMismatchError(CondelayError):
    pass


class MixedSizesError(CondelayError):
    """Topologies in a switching set do not share the agent count."""


# --- delay analysis ---

class DegenerateAceError(CondelayError):
    """Auxiliary characteristic polynomial is identically zero."""


class NoImaginaryRootError(CondelayError):
    """A unit-circle candidate produced no imaginary-axis eigenvalue."""


class TangentialCrossingError(CondelayError):
    """Root tendency is numerically zero: a touch-and-return crossing.

    D-subdivision counting is undefined in this case, so the analysis
    aborts instead of guessing a direction.
    """


class MarginalAtZeroError(CondelayError):
    """An eigenvalue sits on the imaginary axis at zero delay."""


class NegativeNuInternalError(CondelayError):
    """The unstable-root count went negative: a crossing was missed."""


# --- simulation ---

class TooShortError(CondelayError):
    """Trajectory too short relative to the delay to classify."""


# --- configuration ---

class ConfigError(CondelayError):
    """Problem configuration file is missing, unparseable or inconsistent."""


# --- warnings ---

class StaticRootWarning(UserWarning):
    """A characteristic root is pinned at the origin, independent of delay."""


class HurwitzWarning(UserWarning):
    """The open-loop dynamics matrix is Hurwitz; agents would agree on zero
    without cooperating, which the consensus analysis normally assumes away."""


class NonFiniteStateWarning(UserWarning):
    """Simulation diverged to overflow; a truncated trajectory was returned."""
