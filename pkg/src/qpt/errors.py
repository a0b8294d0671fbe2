"""Exception hierarchy.

Every error raised on purpose by the package derives from QPTError. The CLI
maps the three families below onto its exit codes.
"""


class QPTError(Exception):
    """Base class."""


class InvalidInput(QPTError):
    """Malformed data or a reference to something that does not exist."""


class Unsupported(QPTError):
    """A well-formed request that falls outside what the engine can do."""


class BoundExceeded(QPTError):
    """A search or enumeration hit its configured limit."""


class ParseError(InvalidInput):
    pass


class UnknownVertex(InvalidInput):
    pass


class UnknownArrow(InvalidInput):
    pass


class InvalidQP(InvalidInput):
    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(str(v) for v in self.violations))


class NotIndependentSet(InvalidInput):
    pass


class IndexOutOfRange(InvalidInput):
    pass


class ReductionUnsupported(Unsupported):
    pass


class NonHomogeneousPotential(Unsupported):
    pass


class JacobianNotFinite(Unsupported):
    pass


class NotFiniteType(Unsupported):
    pass


class OpaqueSource(Unsupported):
    pass


class OpaqueHeart(Unsupported):
    pass


class OpaqueCompanion(Unsupported):
    pass


class NotAnExtension(Unsupported):
    pass


class HeartNotLifted(Unsupported):
    pass


class PairingViolation(QPTError):
    pass


class IsomorphismFailure(QPTError):
    pass


class PolygonMismatch(InvalidInput):
    pass


class SearchBoundExceeded(BoundExceeded):
    pass


class ChordNotPresent(InvalidInput):
    pass


class InvalidTriangulation(InvalidInput):
    pass
