#!/usr/bin/env python3
"""
Error types for VPR Consensus.

Every error raised by the library carries optional context (module, file,
row/column, index) so the CLI can report exactly where a run failed.
"""

from typing import Any, Optional


class VPRError(Exception):
    """Base error with optional location context."""

    def __init__(
        self,
        message: str,
        module: Optional[str] = None,
        path: Optional[Any] = None,
        row: Optional[int] = None,
        column: Optional[int] = None,
        index: Optional[int] = None
    ):
        super().__init__(message)
        self.message = message
        self.module = module
        self.path = None if path is None else str(path)
        self.row = row
        self.column = column
        self.index = index

    def context(self) -> dict:
        """Return the context items that are set."""
        items = {
            'module': self.module,
            'file': self.path,
            'row': self.row,
            'column': self.column,
            'index': self.index
        }
        return {key: value for key, value in items.items() if value is not None}

    def __str__(self) -> str:
        ctx = self.context()
        if not ctx:
            return self.message
        details = ", ".join(f"{key}={value}" for key, value in ctx.items())
        return f"{self.message} ({details})"


class ValidationError(VPRError, ValueError):
    """Invalid parameters, shapes, indices or input values."""


class FormatError(ValidationError):
    """A descriptor, matrix or ground-truth file that does not parse."""


class DecodeError(VPRError):
    """An image that cannot be decoded."""
