"""Exception hierarchy shared by all lagot modules."""


class LagotError(Exception):
    """Base class for every error raised by this package."""


# measures
class EmptyMeasure(LagotError):
    pass


class WeightSumMismatch(LagotError):
    pass


class DimensionMismatch(LagotError):
    pass


# costs
class UnknownCost(LagotError):
    pass


class BadParam(LagotError):
    pass


class NonMonotoneSlope(LagotError):
    """The tail slope eval(u)/u increased where it should not; the
    sublinearity assumption is violated on the sampled tail."""


# solver
class Infeasible(LagotError):
    pass


class TooLarge(LagotError):
    pass


class UnequalWeights(LagotError):
    pass


# paths
class BadHorizon(LagotError):
    pass


class DegenerateSet(LagotError):
    pass


class DimensionTooSmall(LagotError):
    pass


class CoincidentPoints(LagotError):
    pass


# ensembles
class MissingBound(LagotError):
    pass


class BoundViolated(LagotError):
    pass


class InfeasibleBound(LagotError):
    pass


class NoFeasiblePath(LagotError):
    pass


# duality
class HypothesisNotDeclared(LagotError):
    pass


# harness
class AssumptionRefused(LagotError):
    pass


class ConfigInvalid(LagotError):
    pass


class UnknownKind(LagotError):
    pass
