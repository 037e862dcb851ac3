"""Exception types shared across the pipeline.

Every error that can surface through the CLI carries enough context to
print a ``file:line:col: message`` diagnostic when positions are known.
"""

from __future__ import annotations


class S2gError(Exception):
    """Base class for all errors raised by this package."""

    def __init__(self, message: str, line: int | None = None, col: int | None = None):
        super().__init__(message)
        self.message = message
        self.line = line
        self.col = col

    def diagnostic(self, filename: str = "<input>") -> str:
        if self.line is not None:
            col = self.col if self.col is not None else 0
            return f"{filename}:{self.line}:{col}: {self.message}"
        return f"{filename}: {self.message}"


class ParseError(S2gError):
    """Malformed input text (query or graph file)."""

    def __init__(self, message: str, line: int | None = None, col: int | None = None,
                 expected: tuple[str, ...] = ()):
        if expected:
            message = f"{message} (expected one of: {', '.join(expected)})"
        super().__init__(message, line, col)
        self.expected = expected


class UnsupportedFeatureError(S2gError):
    """Recognized but unsupported construct; names the construct."""

    def __init__(self, construct: str, message: str, line: int | None = None,
                 col: int | None = None):
        super().__init__(message, line, col)
        self.construct = construct


class GraphLoadError(S2gError):
    """Structural problem in a graph file (duplicate id, dangling edge, ...)."""


class ClassificationError(S2gError):
    """A predicate IRI does not carry any registered vertex/edge marker."""


class ScopeError(S2gError):
    """A variable is used by projection/filter/modifier but never bound."""


class EvalTypeError(S2gError):
    """Runtime comparison between incompatible value kinds."""


class NormalizationError(S2gError):
    """A result value has no cross-model comparison key."""
