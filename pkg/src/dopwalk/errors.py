"""Exception hierarchy for dopwalk."""


class WalkError(Exception):
    """Base class for all dopwalk errors."""


class ValidationError(WalkError, ValueError):
    """Input that violates a structural or physical precondition."""


class UnknownVertex(ValidationError):
    pass


class DuplicateEdge(ValidationError):
    pass


class MissingEdgeAssignment(ValidationError):
    pass


class UnexpectedEdgeAssignment(ValidationError):
    pass


class WrongCoinDimension(ValidationError):
    pass


class UnitalConditionViolated(ValidationError):
    def __init__(self, message, residuals=None):
        super().__init__(message)
        self.residuals = dict(residuals or {})


class IsolatedVertex(ValidationError):
    pass


class UnitarityCheckFailed(ValidationError):
    pass


class PairOutsideBasis(ValidationError):
    pass


class NonUnitCoinVector(ValidationError):
    pass


class NotADensityOperator(ValidationError):
    pass


class DimensionMismatch(WalkError, ValueError):
    pass


class DimensionTooLarge(WalkError, ValueError):
    pass


class ZeroProbabilityOutcome(WalkError, ValueError):
    pass


class NegativeProbability(WalkError, ValueError):
    pass


class ConfigParseError(WalkError, ValueError):
    pass
