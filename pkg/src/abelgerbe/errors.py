"""Exception hierarchy.

Every error raised by the package derives from :class:`AbelGerbeError`, so
callers (the CLI in particular) can map failures to exit codes in one place.
"""


class AbelGerbeError(Exception):
    pass


class ComplexError(AbelGerbeError):
    """Invalid simplicial complex input."""


class EmptyInput(ComplexError):
    pass


class DuplicateSimplex(ComplexError):
    pass


class NonManifold(ComplexError):
    pass


class NonOrientable(ComplexError):
    pass


class Disconnected(ComplexError):
    pass


class ResolutionTooSmall(ComplexError):
    pass


class DegreeOutOfRange(AbelGerbeError):
    pass


class OverflowPolicyError(AbelGerbeError):
    pass


class NotACycle(AbelGerbeError):
    pass


class NotABoundary(AbelGerbeError):
    """Raised when a cycle has nonzero homology coordinates.

    The offending coordinates are attached as ``free`` and ``torsion``.
    """

    def __init__(self, message, free=(), torsion=()):
        super().__init__(message)
        self.free = tuple(free)
        self.torsion = tuple(torsion)


class NotUnimodular(AbelGerbeError):
    pass


class SingularPairing(AbelGerbeError):
    pass


class RankAmbiguous(AbelGerbeError):
    pass


class SingularMass(AbelGerbeError):
    pass


class SolverDiverged(AbelGerbeError):
    pass


class DegreeOverflow(DegreeOutOfRange):
    """Product degree exceeds the dimension of the complex."""
