"""Exception hierarchy.

Every precondition violation raises a subclass of :class:`CuspError`; the
CLI maps these to exit code 2 and prints the class name.
"""


class CuspError(ValueError):
    pass


class BadInput(CuspError):
    pass


class RationalRadicand(CuspError):
    """Radicand is a perfect square, so the field degenerates to Q."""


class FieldMismatch(CuspError):
    pass


class DivByZero(CuspError, ZeroDivisionError):
    pass


class NotHyperbolic(CuspError):
    pass


class NotHyperbolicCusp(NotHyperbolic):
    """1/p + 1/q + 1/r >= 1 (Euclidean / Nil cases)."""


class NotHyperbolicCycle(NotHyperbolic):
    """Cycle with every entry equal to 2."""


class NilCase(CuspError):
    pass


class NoSuchSingularity(CuspError):
    pass


class BadArity(CuspError):
    pass


class BadDegree(CuspError):
    pass


class NotInYPlus(CuspError):
    """Point lands outside H x H."""


class ChartBoundary(CuspError):
    """Chart coordinate is zero, so the point lies on an exceptional curve."""


class NotInLattice(CuspError):
    pass
