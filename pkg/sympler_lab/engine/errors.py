"""Exception hierarchy for the SyMPLER engine."""

from typing import Optional


class SymplerError(Exception):
    """Base class for every error raised by sympler_lab."""


class DimensionMismatchError(SymplerError, ValueError):
    """An input vector does not have the dimension the learner was built for."""


class NonFiniteInputError(SymplerError, ValueError):
    """An input or target contains NaN or infinity."""


class BoundDomainError(SymplerError, ValueError):
    """A VC-bound query is outside the domain of the formula."""


class BracketError(SymplerError, RuntimeError):
    """Bisection could not find a sign change in its bracket."""


class EmptyModelError(SymplerError, LookupError):
    """An operation needs at least one local model and there is none."""


class InvalidConfigError(SymplerError, ValueError):
    """A learner, pendulum or run configuration is invalid."""


class InvalidSplitError(SymplerError, ValueError):
    """A warmup/update/evaluation split does not fit the stream."""


class DataFormatError(SymplerError, ValueError):
    """A CSV file is missing a column or holds an unparseable cell."""

    def __init__(
        self,
        message: str,
        row: Optional[int] = None,
        column: Optional[str] = None,
    ):
        super().__init__(message)
        self.row = row
        self.column = column


class SnapshotError(SymplerError, ValueError):
    """A model snapshot is corrupt or was written by an incompatible version."""
