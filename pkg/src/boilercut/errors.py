"""Exception types shared across the package."""


class BoilercutError(Exception):
    """Base class for all errors raised by this package."""


class EncodingError(BoilercutError):
    """Input bytes could not be decoded as HTML text."""


class TableFormatError(BoilercutError):
    """Malformed word-vector table file."""

    def __init__(self, message, line_no=None):
        super().__init__(message)
        self.line_no = line_no


class TableDimensionError(TableFormatError):
    """A table line has the wrong number of vector components."""


class TableNumberError(TableFormatError):
    """A table line contains an unparseable number."""


class TableEmptyError(TableFormatError):
    """The table file contains no entries."""


class GraphShapeError(BoilercutError):
    """Vectors of mixed dimension, or a malformed weight matrix."""


class BadSigmaError(BoilercutError):
    """RBF bandwidth must be strictly positive."""


class SolverError(BoilercutError):
    """Base class for propagation-solver failures."""


class ShapeError(SolverError):
    """Score vector length does not match the graph."""


class NoSeedsError(SolverError):
    """The seed set is empty."""


class NotConvergedError(SolverError):
    """Iteration limit reached before the residual dropped below tol.

    Carries the partial result so callers can inspect or salvage it.
    """

    def __init__(self, message, result):
        super().__init__(message)
        self.result = result


class SingularSystemError(SolverError):
    """The reduced linear system is numerically singular."""


class SeedingError(BoilercutError):
    """Base class for seed-construction failures."""


class NoSeedMatchesError(SeedingError):
    """No block matched any heuristic rule."""


class SeedCoverageError(SeedingError):
    """Ground truth covers fewer blocks than the requested seed count."""


class EvaluationError(BoilercutError):
    """Base class for evaluation failures."""


class NoOverlapError(EvaluationError):
    """Prediction and truth share no matchable blocks."""


class EmptyReportSetError(EvaluationError):
    """Cannot aggregate an empty list of reports."""
