"""
Custom Exception Classes
========================

Exceptions raised across the detection pipeline. Every error carries a
human-readable message plus a ``details`` dict with the offending values,
so the CLI can print one line that names both the cause and the context.

Exception Hierarchy:
    QpcdException (base)
    ├── ConfigurationException
    ├── SignalException
    │   ├── CsvFormatException
    │   ├── AnnotationException
    │   └── SynthesisException
    ├── EmbeddingException
    ├── TransportException
    ├── DetectorException
    ├── BootstrapException
    ├── EvaluationException
    └── StageException
"""

from typing import Optional


class QpcdException(Exception):
    """
    Base exception for all qpcd errors.

    All custom exceptions inherit from this class to allow
    catching every pipeline error with a single except clause.
    """

    def __init__(self, message: str, details: Optional[dict] = None):
        """
        Initialize exception with message and optional details.

        Args:
            message: Human-readable error message
            details: Additional context about the error
        """
        super().__init__(message)
        self.message = message
        self.details = details or {}

    def __str__(self):
        """String representation with details."""
        if self.details:
            detail_str = ", ".join(f"{k}={v}" for k, v in self.details.items())
            return f"{self.message} ({detail_str})"
        return self.message


class ConfigurationException(QpcdException):
    """
    Raised when configuration is invalid.

    Indicates problems with configuration files, environment variables,
    ``--set`` overrides or derived parameters.
    """
    pass


class SignalException(QpcdException):
    """Base exception for series loading and synthesis errors."""
    pass


class CsvFormatException(SignalException):
    """
    Raised when a CSV series cannot be parsed.

    ``row`` is the 1-based line number in the file (the header is line 1).
    """

    def __init__(self, message: str, row: Optional[int] = None, details: Optional[dict] = None):
        details = details or {}
        if row is not None:
            details['row'] = row
        super().__init__(message, details)
        self.row = row


class AnnotationException(SignalException):
    """Raised when an annotation interval is out of bounds or overlaps another."""
    pass


class SynthesisException(SignalException):
    """Raised when synthesis parameters are outside their admissible range."""
    pass


class EmbeddingException(QpcdException):
    """Raised by the sliding-window embedding and PCA."""
    pass


class TransportException(QpcdException):
    """Raised for invalid measures or solver configuration."""
    pass


class DetectorException(QpcdException):
    """Raised when the second sliding window does not fit the cloud."""
    pass


class BootstrapException(QpcdException):
    """Raised for invalid bootstrap configuration or exhausted redraws."""
    pass


class EvaluationException(QpcdException):
    """Raised when scoring input is empty or incomplete."""
    pass


class StageException(QpcdException):
    """
    Wraps an error raised inside a named pipeline stage.

    The CLI reports ``stage: cause`` and exits with status 1.
    """

    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"{stage}: {cause}", {})
        self.stage = stage
        self.cause = cause

    def __str__(self):
        return self.message
