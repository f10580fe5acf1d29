"""Exception types shared across the package."""

from __future__ import annotations


class TseffectError(Exception):
    """Base class for every error raised by this package."""


class GraphFormatError(TseffectError):
    """A graph document could not be parsed.

    ``path`` locates the offending element inside the input document,
    e.g. ``"edges[3]"`` or ``"nodes"``.
    """

    def __init__(self, message: str, path: str = "") -> None:
        self.path = path
        if path:
            message = f"{path}: {message}"
        super().__init__(message)


class GraphInvariantError(TseffectError):
    """A graph value violates a structural invariant (cycles in the
    instantaneous layer, edges to unknown series, and so on)."""


class QueryError(TseffectError):
    """A query is malformed or incompatible with the graph it targets."""


class ModelError(TseffectError):
    """A numeric model is malformed: coefficients that do not match the
    graph, an unstable system, or an estimator fed degenerate data."""


class ResourceCapError(TseffectError):
    """An exhaustive search exceeded its configured cap.

    The caller sees how large the search would have been; results are
    never silently truncated.
    """

    def __init__(self, message: str, needed: int | None = None, cap: int | None = None) -> None:
        self.needed = needed
        self.cap = cap
        super().__init__(message)
