"""
Exception hierarchy
Dense Survival Forest Subgroup Profiler
"""

from typing import List, Optional


class SurvProfileError(Exception):
    """Base class for all errors raised by this package"""


class EmptyDatasetError(SurvProfileError, ValueError):
    def __init__(self, message: str = "empty dataset"):
        super().__init__(message)


class NoEventsError(SurvProfileError, ValueError):
    def __init__(self, message: str = "no events"):
        super().__init__(message)


class NonIdentifiableError(SurvProfileError, ValueError):
    def __init__(self, message: str = "non-identifiable covariate"):
        super().__init__(message)


class NoComparablePairsError(SurvProfileError, ValueError):
    def __init__(self, message: str = "no comparable pairs"):
        super().__init__(message)


class TooManyClustersError(SurvProfileError, ValueError):
    def __init__(self, message: str = "too many clusters"):
        super().__init__(message)


class ConfigurationError(SurvProfileError, ValueError):
    """Invalid pipeline or grid configuration"""


class DatasetValidationError(SurvProfileError, ValueError):
    """Input table failed validation; carries every collected problem"""

    def __init__(self, errors: List[str], row: Optional[int] = None, column: Optional[str] = None):
        self.errors = list(errors)
        self.row = row
        self.column = column
        super().__init__("; ".join(self.errors))


class PipelineStageError(SurvProfileError):
    """Wraps a failure with the pipeline stage it happened in"""

    def __init__(self, stage: str, message: str):
        self.stage = stage
        self.message = message
        super().__init__(f"[{stage}] {message}")
