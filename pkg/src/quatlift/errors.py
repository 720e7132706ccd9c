"""Exception taxonomy.

ConstructionError: an object could not be built from valid-looking input
(bad presentation, failed saturation search, exhausted generator search).

ConsistencyError: an internal identity that must hold by theory failed;
always a bug or an invalid hand-built input, never a recoverable state.

ResourceLimitError: an enumeration exceeded its configured node budget.

UnsupportedIndexError: a Hecke index whose recursion hypotheses fail
(prime factor dividing the discriminant) was requested through the
recursive path.

FitError: no (sign, conductor) candidate made the smoothed L-value
evaluation parameter-independent within tolerance.

PrecisionError: a kernel/eigenvector computation changed between a depth
and its double; the caller should raise the depth.
"""


class QuatliftError(Exception):
    pass


class ConstructionError(QuatliftError):
    pass


class ConsistencyError(QuatliftError):
    pass


class ResourceLimitError(QuatliftError):
    pass


class UnsupportedIndexError(QuatliftError):
    pass


class FitError(QuatliftError):
    pass


class PrecisionError(QuatliftError):
    pass
