"""Exception types raised across the package."""


class FreeDerivError(Exception):
    """Base class for all domain errors (CLI exit code 1)."""


class SingularMatrix(FreeDerivError):
    pass


class DimensionMismatch(FreeDerivError):
    pass


class UnassignedLetter(DimensionMismatch):
    """A letter with a nonzero coefficient block has no matrix assigned."""


class InvalidDirection(FreeDerivError):
    pass


class SeriesUndefined(FreeDerivError):
    """The constant coefficient of the pencil is singular."""


class NotAdmissible(FreeDerivError):
    pass


class NotInvertible(FreeDerivError):
    pass


class SingularPencil(FreeDerivError):
    """Evaluation undefined at the given matrix assignment."""


class RankNotCertified(FreeDerivError):
    pass


class AlphabetMismatch(FreeDerivError):
    pass


class SingularAtAllProbes(FreeDerivError):
    """The substituted pencil was singular at every random probe."""


class FullnessUncertain(UserWarning):
    pass


class StepSingular(FreeDerivError):
    pass


class PatternBilinear(FreeDerivError):
    pass


class MaxIterExceeded(FreeDerivError):
    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace


class SingularIterate(FreeDerivError):
    pass


class ExprSyntaxError(FreeDerivError, ValueError):
    def __init__(self, message, position):
        super().__init__(f"{message} at position {position}")
        self.position = position


class UnknownLetter(FreeDerivError):
    pass
