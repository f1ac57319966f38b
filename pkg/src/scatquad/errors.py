"""Exception types shared across the package."""

from __future__ import annotations


class ScatQuadError(Exception):
    """Base class for all scatquad errors."""


class EmptyResult(ScatQuadError):
    """A filtering operation produced no points."""


class InsufficientData(ScatQuadError):
    """Too few data points for the requested operation."""


class RankDeficient(ScatQuadError):
    """Pivoted elimination found no usable pivot at some step.

    ``step`` is the 1-based index of the pivot being sought when the
    search failed.
    """

    def __init__(self, step: int, message: str | None = None):
        self.step = step
        super().__init__(message or f"no usable pivot at elimination step {step}")


class ParseError(ScatQuadError):
    """A rule or data file is structurally malformed."""

    def __init__(self, path, line_no: int, message: str):
        self.path = str(path)
        self.line_no = line_no
        super().__init__(f"{path}:{line_no}: {message}")


class DegenerateDiagonal(ScatQuadError):
    """A leave-one-out diagonal entry is numerically zero."""


class CoverageFailure(ScatQuadError):
    """A partition-of-unity cover failed to cover a required point."""


class UncoveredPoint(ScatQuadError):
    """Evaluation requested at a point outside every patch ball."""

    def __init__(self, point, message: str | None = None):
        self.point = point
        super().__init__(message or f"point {tuple(point)} lies outside every patch ball")


class AllCandidatesFailed(ScatQuadError):
    """Every candidate in a model-selection grid failed."""


class CoverFailure(ScatQuadError):
    """No unisolvent local subset could be built for some seed point."""


class MuTooSmall(ScatQuadError):
    """Blending exponent does not exceed the convergence threshold."""


class NodeHit(ScatQuadError):
    """Weight evaluation requested exactly on a data point."""


class NodeEvaluationFailure(ScatQuadError):
    """The interpolant could not be evaluated at a cubature node."""

    def __init__(self, node_index: int, cause: Exception | None = None):
        self.node_index = node_index
        self.cause = cause
        super().__init__(f"evaluation failed at cubature node {node_index}: {cause}")
