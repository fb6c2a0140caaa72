"""Exception types raised across the package."""


class ScanPrintError(Exception):
    """Base class for package errors."""


class MalformedTensorError(ScanPrintError, ValueError):
    """A vertex tensor or token sequence violates its structural invariants."""


class ManifestError(ScanPrintError, ValueError):
    """A dataset manifest line could not be parsed or validated."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
