"""Exception types raised across lapsep."""


class LapsepError(Exception):
    """Base class for all input and contract errors."""


class GraphError(LapsepError, ValueError):
    pass


class EmptyEdgeSet(GraphError):
    pass


class OutOfBounds(GraphError):
    pass


class LoopEdge(GraphError):
    pass


class NotABijection(GraphError):
    pass


class DimensionMismatch(LapsepError, ValueError):
    pass


class NotSymmetric(LapsepError, ValueError):
    pass


class NotNormalized(LapsepError, ValueError):
    pass


class NotPSD(LapsepError, ValueError):
    pass


class ZeroVector(LapsepError, ValueError):
    pass


class NotTwoByQ(LapsepError, ValueError):
    pass


class DegreeCriterionViolated(LapsepError):
    """No separable decomposition exists: the graph fails the degree test."""


class NotLineSumSymmetric(LapsepError, ValueError):
    pass


class DegenerateCycle(LapsepError, ValueError):
    pass


class EdgeNotSeparableLocal(LapsepError, ValueError):
    pass


class NoMatchedEdges(LapsepError, ValueError):
    pass


class UnknownFamily(LapsepError, ValueError):
    pass


class TooLarge(LapsepError, ValueError):
    pass


class ParseError(LapsepError, ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class AssertionFailure(LapsepError):
    """A self-check over computed data failed (bug or genuine discrepancy)."""
