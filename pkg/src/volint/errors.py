"""Exception taxonomy for the whole library.

Errors that can be cured by passing a larger coefficient field derive from
EnlargeFieldError so callers can catch the whole family at once.
"""


class VolintError(Exception):
    """Base class for all library errors."""


class SchemaError(VolintError):
    """A job file or structured input failed validation."""


class DivisionByZero(VolintError, ZeroDivisionError):
    def __init__(self, message="division by an element indistinguishable from zero", prec=None):
        super().__init__(message)
        self.prec = prec


class ZeroArgument(VolintError):
    """log of an element indistinguishable from zero."""


class PrecisionExhausted(VolintError):
    """A computation lost more digits than the working precision allows."""


class EnlargeFieldError(VolintError):
    """The requested operation needs a bigger coefficient field; enlarge K."""


class OddValuation(EnlargeFieldError):
    pass


class NonSquareResidue(EnlargeFieldError):
    pass


class NeedsLargerField(EnlargeFieldError):
    pass


class NotCoprimeModP(VolintError):
    pass


class BadConstantTerm(VolintError):
    pass


class EqualPoints(VolintError):
    pass


class NotElliptic(VolintError):
    pass


class TwoTorsionPoint(VolintError):
    pass


class OnBoundary(VolintError):
    """The point retracts to an edge of the skeleton, not a vertex."""

    def __init__(self, message, edge=None):
        super().__init__(message)
        self.edge = edge


class AmbiguousAtPrecision(VolintError):
    pass


class DisconnectedGraph(VolintError):
    pass


class BrokenPath(VolintError):
    pass


class SingularSystem(VolintError):
    pass


class BudgetExceeded(VolintError):
    pass


class PoleAtEndpoint(VolintError):
    pass


class UnparameterizableDegree(VolintError):
    pass


class BackendUnavailable(VolintError):
    """Coleman integration on good-reduction pieces of genus >= 1 requires an
    external Frobenius-based integrator, which this release only exposes as a
    pluggable interface."""


class DegenerateInputPoints(VolintError):
    pass
