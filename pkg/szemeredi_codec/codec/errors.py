"""Exceptions raised across the codec."""

from __future__ import annotations

from pathlib import Path


class CodecError(Exception):
    """Base class for every error raised by ``szemeredi_codec``."""


class InvalidArgumentError(CodecError, ValueError):
    """An argument violates a documented precondition."""


class FormatError(CodecError, ValueError):
    """A serialized artifact is corrupt or has an unsupported layout."""


class ParseError(FormatError):
    """A text input could not be parsed.

    Parameters
    ----------
    message : str
        What went wrong.
    line : int, optional
        1-based line number of the offending record.
    path : str or Path, optional
        The file being parsed.
    """

    def __init__(
        self, message: str, line: int | None = None, path: str | Path | None = None
    ):
        self.line = line
        self.path = None if path is None else Path(path)
        where = ""
        if self.path is not None:
            where += f"{self.path}"
        if line is not None:
            where += f":{line}" if where else f"line {line}"
        super().__init__(f"{where}: {message}" if where else message)


class NoPartitionFoundError(CodecError, RuntimeError):
    """The ε sweep produced no acceptable partition."""
