"""Exception hierarchy shared by the library and the CLI exit-code mapping."""
from __future__ import annotations

from typing import Optional


class DADCError(Exception):
    """Base class for every error raised on purpose by the package."""


class ConfigError(DADCError, ValueError):
    """Raised for invalid parameters or configuration files (exit code 2)."""


class SpecError(ConfigError):
    """Raised when a synthetic dataset specification cannot be generated."""


class DataError(DADCError, ValueError):
    """Raised for unreadable, malformed or empty inputs and unwritable outputs (exit code 3)."""


class ParseError(DataError):
    """Malformed CSV row; carries the 1-based line number."""

    def __init__(self, message: str, line: Optional[int] = None) -> None:
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class NoCenterError(DADCError, RuntimeError):
    """Raised when center selection leaves no Center (exit code 4)."""


EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_NO_CENTER = 4


def exit_code_for(exc: BaseException) -> int:
    """Map an exception to the CLI exit status."""
    if isinstance(exc, NoCenterError):
        return EXIT_NO_CENTER
    if isinstance(exc, ConfigError):
        return EXIT_CONFIG
    if isinstance(exc, (DataError, OSError)):
        return EXIT_DATA
    return 1


__all__ = [
    "DADCError",
    "ConfigError",
    "SpecError",
    "DataError",
    "ParseError",
    "NoCenterError",
    "EXIT_OK",
    "EXIT_CONFIG",
    "EXIT_DATA",
    "EXIT_NO_CENTER",
    "exit_code_for",
]
