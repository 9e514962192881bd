"""
Exception types raised by the toolkit.

Library code raises these; the CLI and the benchmark runner catch
ToolkitError and turn it into a logged error or a failed report row.
"""


class ToolkitError(Exception):
    """Base class for all toolkit errors."""


class ImageFormatError(ToolkitError):
    """Image file is unreadable, empty or in an unsupported format."""


class DimensionMismatchError(ToolkitError, ValueError):
    """Two inputs that must share a shape do not."""


class EstimationError(ToolkitError, ValueError):
    """A background-light or transmission estimator cannot run on its input."""


class ConfigError(ToolkitError, ValueError):
    """Configuration file or constant set is malformed."""


class DatasetError(ToolkitError):
    """Dataset directory or annotation file is unusable."""
