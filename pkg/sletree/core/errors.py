"""Exception hierarchy for sletree.

Every domain error subclasses ``SletreeError``, itself a ``ValueError``, so
callers that only care about "bad input" can catch ``ValueError``.
"""


class SletreeError(ValueError):
    """Base class for all sletree domain errors."""


# Patch construction


class Disconnected(SletreeError):
    """The face set is not edge-connected."""


class NotSimplyConnected(SletreeError):
    """The complement of the face set is disconnected (the patch has a hole)."""


class NoDegreeTwoBoundaryVertex(SletreeError):
    """The requested root position is not a degree-2 boundary vertex."""


# Trees and loops


class NotBranchSeparated(SletreeError):
    """A spanning tree fails the branch-separation criterion."""


class IntervalNestingError(SletreeError):
    """Loop intervals along the boundary path overlap without nesting."""


# Sampling


class TooLarge(SletreeError):
    """Exact enumeration requested on a patch with too many faces."""


class OutOfRange(SletreeError):
    """A scalar argument lies outside its admissible range."""


class DegenerateDelta(SletreeError):
    """The principal-value identity was requested at dimension 1."""


class InvalidSkewCombo(SletreeError):
    """Unsupported (delta, beta, mu) combination for a skew Bessel process."""


class InadmissibleParams(SletreeError):
    """Unsupported (kappa, rho, beta, mu) combination for a driver."""


__all__ = [
    "SletreeError",
    "Disconnected",
    "NotSimplyConnected",
    "NoDegreeTwoBoundaryVertex",
    "NotBranchSeparated",
    "IntervalNestingError",
    "TooLarge",
    "OutOfRange",
    "DegenerateDelta",
    "InvalidSkewCombo",
    "InadmissibleParams",
]
