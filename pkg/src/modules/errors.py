"""
Exception hierarchy for gsketch.
"""
from typing import Optional


class GSketchError(Exception):
    """Base class for every error raised by the library."""


class InputShapeError(GSketchError, ValueError):
    """An array had the wrong length, rank or dimension."""


class EmptyInputError(GSketchError, ValueError):
    """A point set or value list was empty where at least one element is required."""


class FingerprintMismatchError(GSketchError, ValueError):
    """Embeddings drawn from different sketch configurations were mixed."""


class InfeasibleParametersError(GSketchError, ValueError):
    """The planner could not satisfy the requested accuracy within its caps."""


class NumericalError(GSketchError, ArithmeticError):
    """A factorization failed or produced values outside tolerated bounds."""


class SketchFileError(GSketchError, ValueError):
    """A binary sketch file is malformed or fails fingerprint verification."""


class ParseError(GSketchError, ValueError):
    """A point-set file could not be parsed."""

    def __init__(self, message: str, line_number: Optional[int] = None):
        self.line_number = line_number
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)


class UsageError(GSketchError, ValueError):
    """Command-line arguments are missing, contradictory or out of range."""
