"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: ValidationError -> 2,
CapacityError -> 3, StageError -> 4.
"""


class SpinfoldError(Exception):
    """Base class for all package errors."""


class ValidationError(SpinfoldError):
    """Malformed input: bad encodings, bad plans, inconsistent files."""


class CapacityError(SpinfoldError):
    """Problem too large for an exhaustive or dense code path."""


class StageError(SpinfoldError):
    """A pipeline stage failed; carries the stage name."""

    def __init__(self, stage, message):
        super().__init__(f"stage '{stage}': {message}")
        self.stage = stage
