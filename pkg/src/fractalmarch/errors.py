"""Exception types shared across the package."""


class FractalMarchError(Exception):
    """Base class for package errors."""


class DegenerateOrigin(FractalMarchError):
    """Triplex power requested at the origin, where its angles are undefined."""


class DegenerateGradient(FractalMarchError):
    """Numerical gradient vanished; no normal direction can be derived."""


class DegenerateBasis(FractalMarchError):
    """Camera up vector is parallel to the view direction."""


class SingularTransform(FractalMarchError):
    """Instance transform is not invertible."""


class ParseError(FractalMarchError):
    """Scene document is not well-formed.

    Carries ``line`` and ``column`` when the underlying parser provides them.
    """

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        if line is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)
        self.line = line
        self.column = column


class ValidationError(FractalMarchError):
    """Scene document violates an invariant. ``field`` is the offending path."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


class IoError(FractalMarchError):
    """Image or frame output could not be written."""
