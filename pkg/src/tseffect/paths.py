"""Paths with endpoint marks, blocking rules, and d-separation.

All functions take graphs through a small duck-typed surface: the graph
must expose ``has_edge(u, v)``, ``parents_of(v)`` and ``children_of(v)``.
Both ``Scg`` (vertices are series names) and the unrolled ``TimedGraph``
(vertices are ``TimedVertex``) satisfy it.

Between two consecutive path vertices ``u, v`` the mark records edge
direction: FORWARD for ``u -> v``, BACKWARD for ``u <- v``, BOTH when the
graph has the edge in both directions (only possible in a summary graph).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterator, Sequence

from .errors import GraphInvariantError, ResourceCapError
from .graphs import TimedVertex, descendants


class Mark(enum.Enum):
    FORWARD = "->"
    BACKWARD = "<-"
    BOTH = "<->"


def _vertex_label(v) -> str:
    if isinstance(v, TimedVertex):
        return v.label()
    return str(v)


@dataclass(frozen=True)
class MarkedPath:
    """A simple path together with the direction mark of each step."""

    vertices: tuple
    marks: tuple

    def __init__(self, vertices: Sequence, marks: Sequence[Mark]) -> None:
        vs = tuple(vertices)
        ms = tuple(marks)
        if len(vs) < 2:
            raise GraphInvariantError("a path needs at least two vertices")
        if len(set(vs)) != len(vs):
            raise GraphInvariantError("path vertices must be distinct")
        if len(ms) != len(vs) - 1:
            raise GraphInvariantError(
                f"{len(vs)} vertices need {len(vs) - 1} marks, got {len(ms)}"
            )
        object.__setattr__(self, "vertices", vs)
        object.__setattr__(self, "marks", ms)

    @property
    def interior(self) -> tuple:
        return self.vertices[1:-1]

    def __str__(self) -> str:
        parts = [_vertex_label(self.vertices[0])]
        for mark, v in zip(self.marks, self.vertices[1:]):
            parts.append(mark.value)
            parts.append(_vertex_label(v))
        return " ".join(parts)


def mark_between(g, u, v) -> Mark:
    """The mark of the step from ``u`` to ``v``; both vertices must be adjacent."""
    fwd = g.has_edge(u, v)
    back = g.has_edge(v, u)
    if fwd and back:
        return Mark.BOTH
    if fwd:
        return Mark.FORWARD
    if back:
        return Mark.BACKWARD
    raise GraphInvariantError(f"{_vertex_label(u)} and {_vertex_label(v)} are not adjacent")


def marked_path(g, vertices: Sequence) -> MarkedPath:
    """Build a ``MarkedPath`` from a vertex sequence, reading marks off ``g``."""
    vs = list(vertices)
    marks = [mark_between(g, vs[i], vs[i + 1]) for i in range(len(vs) - 1)]
    return MarkedPath(vs, marks)


def enumerate_simple_paths(g, src, dst, cap: int = 100_000) -> list[MarkedPath]:
    """Every simple path between ``src`` and ``dst``, in depth-first order.

    Neighbors are expanded in sorted order, so the result order is
    reproducible. Exceeding ``cap`` raises ``ResourceCapError`` rather than
    returning a truncated list.
    """
    if src == dst:
        raise GraphInvariantError("path endpoints must differ")
    found: list[MarkedPath] = []

    def neighbors(u):
        return sorted(set(g.children_of(u)) | set(g.parents_of(u)))

    def walk(u, path: list, marks: list[Mark]) -> None:
        for w in neighbors(u):
            if w in path:
                continue
            step = mark_between(g, u, w)
            if w == dst:
                if len(found) >= cap:
                    raise ResourceCapError(
                        f"more than {cap} simple paths between "
                        f"{_vertex_label(src)} and {_vertex_label(dst)}",
                        cap=cap,
                    )
                found.append(MarkedPath(path + [w], marks + [step]))
            else:
                walk(w, path + [w], marks + [step])

    walk(src, [src], [])
    return found


def is_backdoor(p: MarkedPath) -> bool:
    """Whether the path opens with an arrowhead at its first vertex."""
    return p.marks[0] in (Mark.BACKWARD, Mark.BOTH)


def _strict_collider(m_in: Mark, m_out: Mark) -> bool:
    return m_in is Mark.FORWARD and m_out is Mark.BACKWARD


def is_sigma_active_empty(p: MarkedPath) -> bool:
    """Activity of a summary-graph path given an empty conditioning set.

    An interior vertex blocks only when both neighboring marks point at it
    unambiguously (``-> v <-``). A two-headed mark on either side leaves
    open a candidate in which the vertex is a non-collider, so the path
    stays active.
    """
    for i in range(1, len(p.vertices) - 1):
        if _strict_collider(p.marks[i - 1], p.marks[i]):
            return False
    return True


def is_blocked_dag(p: MarkedPath, z: frozenset, g) -> bool:
    """Standard path blocking in a DAG.

    ``p`` must live in a DAG, so marks are FORWARD or BACKWARD only. The
    path is blocked by ``z`` when some interior vertex is a non-collider
    in ``z``, or a collider whose descendants (itself included) miss ``z``
    entirely.
    """
    for i in range(1, len(p.vertices) - 1):
        v = p.vertices[i]
        m_in, m_out = p.marks[i - 1], p.marks[i]
        if m_in is Mark.BOTH or m_out is Mark.BOTH:
            raise GraphInvariantError("two-headed mark in a DAG path")
        if _strict_collider(m_in, m_out):
            if not (descendants(g, v) & z):
                return True
        elif v in z:
            return True
    return False


def d_separated(g, a, b, z: frozenset, cap: int = 100_000) -> bool:
    """Whether ``z`` blocks every simple path between ``a`` and ``b`` in a DAG."""
    for p in enumerate_simple_paths(g, a, b, cap=cap):
        if not is_blocked_dag(p, z, g):
            return False
    return True
