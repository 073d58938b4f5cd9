"""Exception types shared across the library."""


class ParameterError(ValueError):
    """An argument violates an operation's precondition."""


class DegenerateInputError(ValueError):
    """Input is structurally valid but carries no usable signal (e.g. all zeros)."""


class NumericError(ArithmeticError):
    """Non-finite values were encountered where finite numbers are required."""


class RecordingLoadError(ValueError):
    """Problem loading a recording or ground-truth file.

    ``line`` is the 1-based line number in the offending file when known.
    """

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class ColumnError(RecordingLoadError):
    """Signal file header is missing a required column or has an unknown one."""


class CellError(RecordingLoadError):
    """A data row is malformed or contains a non-numeric cell."""


class SampleRateError(RecordingLoadError):
    """Signal file does not declare its sampling rate."""


class TruthAlignmentError(RecordingLoadError):
    """Ground-truth BPM count does not match the recording's window count."""
