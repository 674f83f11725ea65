"""Exception hierarchy shared by every module."""


class SquareHitError(Exception):
    """Base class for all library errors."""


class PreconditionViolated(SquareHitError, ValueError):
    pass


class LemmaViolation(SquareHitError, AssertionError):
    """A certified guarantee failed on a concrete input.

    Raised only when the hypotheses of a patch lemma were verified and the
    conclusion still does not hold, which would mean a transcription bug.
    """


class MalformedPolygon(SquareHitError, ValueError):
    pass


class ResolutionTooCoarse(SquareHitError, ValueError):
    pass


class SearchFailed(SquareHitError, RuntimeError):
    pass


class NotAxisParallel(SquareHitError, ValueError):
    pass


class CoverageCheckFailed(SquareHitError, RuntimeError):
    pass


class Inconclusive(SquareHitError, RuntimeError):
    pass


class InstanceTooLarge(SquareHitError, RuntimeError):
    pass


class ModeInapplicable(SquareHitError, ValueError):
    pass


class NotUnitFamily(SquareHitError, ValueError):
    pass


class ConstructionInvalid(SquareHitError, RuntimeError):
    pass


class MalformedPath(SquareHitError, ValueError):
    pass


class ParseError(SquareHitError, ValueError):
    pass


class SchemaError(SquareHitError, ValueError):
    pass
