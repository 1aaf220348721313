"""Exception hierarchy shared by the library and the CLI."""


class SloccError(Exception):
    """Base class for every error raised by this package."""

    exit_code = 1
    code = "SLOCC_ERROR"


class InvalidInputError(SloccError):
    """Malformed user input: bad descriptors, state files, spectra or arities."""

    exit_code = 2
    code = "INVALID_INPUT"


class ShapeMismatchError(InvalidInputError):
    """Operands whose dimensions or per-site counts do not fit the system."""

    code = "SHAPE_MISMATCH"


class CrossCheckError(SloccError):
    """Two independent computations of the same quantity disagreed."""

    exit_code = 3
    code = "CROSS_CHECK_FAILED"

    def __init__(self, message: str, deviation: float | None = None) -> None:
        super().__init__(message)
        self.deviation = deviation
