"""Exceptions raised by the performance model."""

from typing import Optional


class PerfModelError(ValueError):
    """Base class for domain errors (invalid inputs, failed fits, bad documents)."""


class ArchitectureError(PerfModelError):
    """A CNN architecture violates a layer invariant."""

    def __init__(self, message: str, layer_index: Optional[int] = None):
        self.layer_index = layer_index
        if layer_index is not None:
            message = f"layer {layer_index}: {message}"
        super().__init__(message)


class ContentionFitError(PerfModelError):
    """Not enough samples to fit or evaluate a contention profile."""


class CalibrationError(PerfModelError):
    """OperationFactor cannot be solved for the given measurement."""


class EvaluationError(PerfModelError):
    """A measured run could not be predicted."""

    def __init__(self, message: str, row: int):
        self.row = row
        super().__init__(f"row {row}: {message}")


class DatasetError(PerfModelError):
    """A dataset or architecture document is missing or inconsistent."""


class MeasurementFormatError(PerfModelError):
    """A measured-runs CSV has a malformed cell."""

    def __init__(self, message: str, row: int, column: str):
        self.row = row
        self.column = column
        super().__init__(f"row {row}, column '{column}': {message}")
