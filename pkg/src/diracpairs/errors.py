"""Exception types shared across the package.

All package-specific failures derive from :class:`DiracPairsError` so that
callers (in particular the batch runner) can distinguish them from plain
programming errors.  Argument validation uses ``ValueError`` as usual.
"""


class DiracPairsError(Exception):
    """Base class for all diracpairs errors."""


class WindowTooSmall(DiracPairsError):
    """A boundary condition references a mode outside the truncation window."""


class UnsupportedModel(DiracPairsError):
    """The condition or operation is not defined for this spectrum model."""


class IllConditioned(DiracPairsError):
    """A numerical rank decision lacks the required singular-value gap."""


class NotGraphDecomposable(DiracPairsError):
    """The projection of the subspace onto the spectral cut is singular,
    so the subspace is not (numerically) a graph over the cut."""


class InternalInconsistency(DiracPairsError):
    """The two independent Fredholm diagnostic routes disagree."""


class StepTooLarge(DiracPairsError):
    """The evolution integrator step violates the unitarity tolerance."""


class NotConverged(DiracPairsError):
    """An extrapolated spectral sum did not reach the requested accuracy."""


class ConventionViolation(DiracPairsError):
    """An index formula assembled to a non-integer value."""


class NonProductStructure(DiracPairsError):
    """A spectral index formula was asked for a non-product configuration."""


class ScenarioError(DiracPairsError):
    """A scenario file failed to parse or violates the schema."""
