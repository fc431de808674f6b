"""Exception hierarchy.

Scenario/input problems derive from :class:`ScenarioError` (CLI exit code 1);
everything else raised while computing derives from :class:`ComputeError`
(exit code 2).
"""


class PtLoadError(Exception):
    """Base class for all package errors."""


class ScenarioError(PtLoadError):
    """Invalid or unreadable input."""


class ParseError(ScenarioError):
    pass


class ValidationError(ScenarioError):
    pass


class MissingField(ScenarioError):
    pass


class IndivisiblePartition(ValidationError):
    pass


class NotPSD(ValidationError):
    pass


class EmptyTrace(ScenarioError):
    pass


class NonNumericValue(ScenarioError):
    pass


class NegativePower(ScenarioError):
    pass


class ComputeError(PtLoadError):
    """Failure during a computation on otherwise valid input."""


class DegenerateDenominator(ComputeError):
    pass


class EmptyScenario(ComputeError):
    pass


class ShapeMismatch(ComputeError):
    pass


class IndexOutOfRange(ComputeError):
    pass


class EmptyCloud(ComputeError):
    pass


class NonFinite(ComputeError):
    pass


class AllBandsUnusable(ComputeError):
    pass


class ZeroBaseline(ComputeError):
    pass


class StageError(ComputeError):
    """Wraps an upstream error with the name of the pipeline stage."""

    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"{stage}: {type(cause).__name__}: {cause}")
        self.stage = stage
        self.cause = cause


class IoError(PtLoadError):
    """An output file could not be written."""
