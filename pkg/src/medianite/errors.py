"""Exception types raised across the package."""


class MedianiteError(Exception):
    pass


class AxiomViolation(MedianiteError, ValueError):
    """A declared order fails the poc-set axioms.

    ``kind`` is one of ``"antisymmetry"``, ``"dagger"`` or ``"degenerate-pair"``
    and ``witness`` holds the offending pair of elements.
    """

    def __init__(self, kind, witness, message=None):
        self.kind = kind
        self.witness = witness
        super().__init__(message or f"{kind} violated by {witness!r}")


class MissingWeight(MedianiteError, ValueError):
    pass


class SameWall(MedianiteError, ValueError):
    pass


class NotATree(MedianiteError, ValueError):
    pass


class TooManyWalls(MedianiteError, ValueError):
    pass


class NotMinimal(MedianiteError, ValueError):
    pass


class WeightMismatch(MedianiteError, ValueError):
    pass


class DegenerateWall(MedianiteError, ValueError):
    pass


class GridTooFine(MedianiteError, RuntimeError):
    pass


class NotSeparated(MedianiteError, ValueError):
    pass


class NotConvex(MedianiteError, ValueError):
    pass


class InvalidPoint(MedianiteError, ValueError):
    pass


class DocumentError(MedianiteError, ValueError):
    """Input document is malformed or does not follow the poc-set schema."""
