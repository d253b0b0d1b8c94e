"""Exception hierarchy shared across the package."""

from __future__ import annotations


class JoltoptError(Exception):
    """Base class for all package errors."""


class ParameterError(JoltoptError, ValueError):
    """Invalid or unknown configuration/scenario parameter."""


class TsplibParseError(JoltoptError, ValueError):
    """Malformed TSPLIB input. Carries the 1-based offending line number."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class UnsupportedFormatError(TsplibParseError):
    """TSPLIB file is well-formed but uses an unsupported variant."""


class InvalidPermutationError(JoltoptError, ValueError):
    """A tour is not a permutation of the expected indices."""


class DegenerateGeometryError(JoltoptError, ValueError):
    """Zero-distance link geometry (stop or device coincides with the IRS)."""


class ConstraintViolationError(JoltoptError):
    """A named problem constraint (C1..C9) does not hold.

    `constraint` is the short name, e.g. "C3"; the message explains the
    specific failure.
    """

    def __init__(self, constraint: str, message: str):
        super().__init__(f"{constraint}: {message}")
        self.constraint = constraint


class UnreachableDeviceError(JoltoptError):
    """An assigned link has zero rate, so its transfer would never finish."""


class SizeLimitError(JoltoptError, ValueError):
    """Input too large for an exact/enumerative operation."""


class InitializationError(JoltoptError):
    """No feasible starting deployment found within the attempt budget."""


class InstanceLookupError(JoltoptError, KeyError):
    """Unknown benchmark instance name. Lists the bundled ones."""

    def __init__(self, name: str, available: list[str]):
        super().__init__(
            f"unknown instance {name!r}; bundled instances: {', '.join(available)}"
        )
        self.name = name
        self.available = available
