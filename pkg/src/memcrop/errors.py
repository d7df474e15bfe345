"""Exception hierarchy shared across the package.

The CLI maps these onto process exit codes: invalid arguments and bad
configuration exit 2, malformed input files exit 3, per-video processing
failures exit 4.
"""


class MemcropError(Exception):
    """Base class for all errors raised by this package."""


class InvalidArgumentError(MemcropError, ValueError):
    """An argument or configuration value violates a documented precondition."""


class InputFormatError(MemcropError):
    """An input file or directory is missing, unreadable, or malformed."""


class DimensionMismatchError(InvalidArgumentError):
    """Two artifacts that must share dimensions do not."""


class BackendError(MemcropError):
    """A saliency or scoring backend failed to produce a usable value."""


class MissingScoreError(BackendError):
    """A file-backed scorer has no row for the requested video/frame key."""
