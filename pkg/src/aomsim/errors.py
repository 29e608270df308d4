"""Exception hierarchy for aomsim.

Everything raised on bad input or violated preconditions derives from
AomsimError so callers (and the CLI) can catch expected failures without
swallowing genuine bugs.
"""


class AomsimError(Exception):
    """Base class for all expected aomsim failures."""


class DimensionMismatchError(AomsimError):
    """Kets or states with incompatible slot counts were combined."""


class EmptyStateError(AomsimError):
    """An operation produced or received a state with no surviving amplitude."""


class NormalizationError(AomsimError):
    """A normalized state was required but the input is not normalized."""


class InvalidParamsError(AomsimError):
    """Device parameters or transform data violate their invariants."""


class ModeCollisionError(AomsimError):
    """A transform's output labels collide with modes it does not act on."""


class CompositionError(AomsimError):
    """Two transforms were chained but their port labels do not line up."""


class BipartitionError(AomsimError):
    """A slot bipartition is empty, full, or names unknown slots."""


class ComparisonError(AomsimError):
    """Two density matrices over different slot sets were compared."""


class NonHermitianError(AomsimError):
    """A matrix that must be Hermitian is not (within tolerance)."""


class StructureError(AomsimError):
    """A state does not have the two-branch shape a decomposition needs."""


class EmptySelectionError(AomsimError):
    """Post-selection removed every term of the state."""


class FormatError(AomsimError):
    """A JSON document does not match the expected schema."""
