"""Exception hierarchy.

Every numerical failure carries a ``stage`` label so that scripted pipelines
(and the CLI exit-code contract) can tell which step broke.
"""


class LSMMError(Exception):
    """Base class for all library errors."""

    stage = "lsmm"

    def __init__(self, message="", *, stage=None, **details):
        super().__init__(message)
        if stage is not None:
            self.stage = stage
        self.details = details

    @property
    def reason(self):
        return type(self).__name__


class ValidationError(LSMMError):
    """Bad user input (shapes, malformed files, inconsistent specs)."""

    stage = "input"


class ModelFormatError(ValidationError):
    pass


class ConjugateClosureViolation(ValidationError):
    stage = "generator"


class DuplicatePoint(ValidationError):
    stage = "generator"


class SingularResolvent(LSMMError):
    stage = "statespace"


class EigenFailure(LSMMError):
    stage = "statespace"


class SpectraOverlap(LSMMError):
    stage = "sylvester"


class IllConditioned(LSMMError):
    stage = "sylvester"


class TransformSingular(LSMMError):
    stage = "generator"


class PlacementFailure(LSMMError):
    stage = "reduction"


class PairSplit(LSMMError):
    stage = "reduction"


class DefectiveEigenvalue(LSMMError):
    stage = "reduction"


class RankDeficient(LSMMError):
    stage = "reduction"


class InadmissibleParameters(LSMMError):
    stage = "reduction"


class NotSkew(LSMMError):
    stage = "analysis"


class HypothesisViolated(LSMMError):
    stage = "analysis"


class DivisionNearZero(LSMMError):
    stage = "analysis"


class DegenerateDraw(LSMMError):
    stage = "bench"
