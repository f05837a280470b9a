"""Error types raised across the package."""

from __future__ import annotations


class PrivscError(Exception):
    """Base class for all domain errors.

    The harness records these per trial instead of aborting a batch; any
    other exception type counts as an unexpected failure.
    """


# knowledge graph ----------------------------------------------------------


class DuplicateId(PrivscError):
    pass


class DanglingEndpoint(PrivscError):
    pass


class DuplicateTriple(PrivscError):
    pass


class MissingTriple(PrivscError):
    pass


class UnknownEntity(PrivscError, KeyError):
    pass


class DisconnectedTerminals(PrivscError):
    def __init__(self, partition):
        self.partition = [sorted(part) for part in partition]
        super().__init__(f"terminals span {len(self.partition)} components: {self.partition}")


class GraphFormatError(PrivscError, ValueError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


# knowledge management -----------------------------------------------------


class EmptySalt(PrivscError, ValueError):
    pass


class NoEntitiesMatched(PrivscError):
    pass


class SequenceGap(PrivscError):
    pass


class AccessDenied(PrivscError):
    """Raised instead of returning any part of a protected graph."""

    BAD_TAG = "BadTag"
    INSUFFICIENT_PERMISSION = "InsufficientPermission"

    def __init__(self, reason):
        self.reason = reason
        super().__init__(f"denied: {reason}")


# codec --------------------------------------------------------------------


class WidthTooSmall(PrivscError, ValueError):
    pass


class UnknownToken(PrivscError, KeyError):
    pass


class MisalignedFrame(PrivscError, ValueError):
    pass


# harness ------------------------------------------------------------------


class ParseError(PrivscError, ValueError):
    def __init__(self, message, line):
        self.line = line
        super().__init__(f"line {line}: {message}")


class ValidationError(PrivscError, ValueError):
    def __init__(self, key, message=""):
        self.key = key
        super().__init__(f"{key}: {message}" if message else key)
