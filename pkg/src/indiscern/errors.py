"""Exception types shared across the toolkit."""

from __future__ import annotations


class IndiscernError(Exception):
    """Base class for every error raised by this package."""


class ParseError(IndiscernError, ValueError):
    """Syntax error in a formula or a structure file.

    ``position`` is a character offset for formulas and a ``(line, column)``
    pair (both 1-based) for structure files.
    """

    def __init__(self, message, position=None, expected=()):
        self.message = message
        self.position = position
        self.expected = tuple(expected)
        super().__init__(self._render())

    def _render(self):
        text = self.message
        if self.position is not None:
            if isinstance(self.position, tuple):
                text = f"{self.position[0]}:{self.position[1]}: {text}"
            else:
                text = f"at offset {self.position}: {text}"
        if self.expected:
            text += " (expected " + ", ".join(self.expected) + ")"
        return text


class SignatureError(IndiscernError, ValueError):
    """A formula or request does not fit the signature it is used with."""


class CapExceeded(IndiscernError, ValueError):
    """A brute-force routine was asked to run beyond its size cap."""


class NamingConflictWarning(UserWarning):
    """A generated symbol name collided with an existing one and was suffixed."""
