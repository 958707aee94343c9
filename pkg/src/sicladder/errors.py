"""Exception types shared across the package."""


class SicladderError(Exception):
    """Base class for all package errors."""


class NotUnitary(SicladderError):
    pass


class RankDeficient(SicladderError):
    pass


class DimensionMismatch(SicladderError):
    pass


class NotOrthonormal(SicladderError):
    pass


class BadDimension(SicladderError):
    pass


class NotCoprime(SicladderError):
    pass


class NotSymplectic(SicladderError):
    pass


class NoMatchingPhase(SicladderError):
    pass


class EmptyEigenspace(SicladderError):
    pass


class NotASic(SicladderError):
    pass


class SearchFailed(SicladderError):
    pass


class BadPairing(SicladderError):
    pass


class ParamCountMismatch(SicladderError):
    pass


class AlignmentRequired(SicladderError):
    pass


class WrongCount(SicladderError):
    pass


class BadCompletion(SicladderError):
    pass
