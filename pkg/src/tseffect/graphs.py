"""Graph abstractions over stationary discrete-time causal structure.

Three views of the same underlying process, from most to least detailed:

- ``Ftcg``: the full time graph, stored as its repeating lag pattern. An
  edge entry ``(a, b) -> {lags}`` means ``a_{s-lag} -> b_s`` for every time
  ``s`` and every ``lag`` in the set.
- ``Escg``: a two-slice summary. A lagged edge ``a -> b`` means "a at some
  strictly earlier time drives b now"; an instantaneous edge means "a
  drives b within the same time step".
- ``Scg``: the coarsest summary, a plain digraph over the series names.
  Cycles and self-loops are allowed; ``a <-> b`` is just both directed
  edges.

Vertices of an unrolled graph are ``TimedVertex`` pairs. Times are offsets
relative to the reference time of a query, so 0 means "now" and negative
values reach into the past.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, NamedTuple, Union

from .errors import GraphInvariantError

SeriesId = str

Edge = tuple[SeriesId, SeriesId]


class TimedVertex(NamedTuple):
    """One series at one time offset."""

    series: SeriesId
    time: int

    def label(self) -> str:
        return f"{self.series}@{offset_label(self.time)}"


def offset_label(time: int) -> str:
    """Render a time offset the way reports spell it: ``t``, ``t-2``, ``t+1``."""
    if time == 0:
        return "t"
    if time < 0:
        return f"t{time}"
    return f"t+{time}"


def _check_endpoints(edges: Iterable[Edge], series: frozenset[SeriesId], what: str) -> None:
    for a, b in edges:
        if a not in series or b not in series:
            raise GraphInvariantError(f"{what} ({a}, {b}) mentions a series not in the graph")


def _has_cycle(vertices: Iterable[SeriesId], edges: Iterable[Edge]) -> bool:
    children: dict[SeriesId, list[SeriesId]] = {v: [] for v in vertices}
    indeg = {v: 0 for v in children}
    for a, b in edges:
        children[a].append(b)
        indeg[b] += 1
    ready = [v for v, d in indeg.items() if d == 0]
    seen = 0
    while ready:
        v = ready.pop()
        seen += 1
        for w in children[v]:
            indeg[w] -= 1
            if indeg[w] == 0:
                ready.append(w)
    return seen != len(indeg)


@dataclass(frozen=True)
class Scg:
    """Summary causal graph: a digraph over series names."""

    series: frozenset[SeriesId]
    edges: frozenset[Edge]

    def __init__(self, series: Iterable[SeriesId], edges: Iterable[Edge]) -> None:
        object.__setattr__(self, "series", frozenset(series))
        object.__setattr__(self, "edges", frozenset((a, b) for a, b in edges))
        _check_endpoints(self.edges, self.series, "edge")

    def has_edge(self, a: SeriesId, b: SeriesId) -> bool:
        return (a, b) in self.edges

    def parents_of(self, v: SeriesId) -> set[SeriesId]:
        return {a for a, b in self.edges if b == v}

    def children_of(self, v: SeriesId) -> set[SeriesId]:
        return {b for a, b in self.edges if a == v}

    @property
    def vertices(self) -> frozenset[SeriesId]:
        return self.series


@dataclass(frozen=True)
class Escg:
    """Extended summary causal graph: lagged plus instantaneous layers.

    The instantaneous layer must be acyclic and free of self-loops; the
    lagged layer may contain self-loops (a series driving its own future).
    """

    series: frozenset[SeriesId]
    lagged_edges: frozenset[Edge]
    inst_edges: frozenset[Edge]

    def __init__(
        self,
        series: Iterable[SeriesId],
        lagged_edges: Iterable[Edge],
        inst_edges: Iterable[Edge],
    ) -> None:
        object.__setattr__(self, "series", frozenset(series))
        object.__setattr__(self, "lagged_edges", frozenset((a, b) for a, b in lagged_edges))
        object.__setattr__(self, "inst_edges", frozenset((a, b) for a, b in inst_edges))
        _check_endpoints(self.lagged_edges, self.series, "lagged edge")
        _check_endpoints(self.inst_edges, self.series, "instantaneous edge")
        for a, b in self.inst_edges:
            if a == b:
                raise GraphInvariantError(f"instantaneous self-loop on {a}")
        if _has_cycle(self.series, self.inst_edges):
            raise GraphInvariantError("instantaneous layer has a cycle")

    def lagged_parents_of(self, v: SeriesId) -> set[SeriesId]:
        return {a for a, b in self.lagged_edges if b == v}

    def inst_parents_of(self, v: SeriesId) -> set[SeriesId]:
        return {a for a, b in self.inst_edges if b == v}


class Ftcg:
    """Full time causal graph of a stationary process.

    ``lags`` maps an ordered series pair to the set of lags at which the
    edge repeats: ``(a, b) -> {0, 2}`` puts ``a_s -> b_s`` and
    ``a_{s-2} -> b_s`` at every time ``s``. ``max_lag`` is the declared
    bound on lags (the graph may use fewer).
    """

    __slots__ = ("series", "lags", "max_lag")

    def __init__(
        self,
        series: Iterable[SeriesId],
        lags: Mapping[Edge, Iterable[int]],
        max_lag: int,
    ) -> None:
        self.series: frozenset[SeriesId] = frozenset(series)
        self.max_lag: int = int(max_lag)
        if self.max_lag < 1:
            raise GraphInvariantError(f"max_lag must be at least 1, got {max_lag}")
        normalized: dict[Edge, frozenset[int]] = {}
        for (a, b), ls in lags.items():
            lagset = frozenset(int(l) for l in ls)
            if not lagset:
                continue
            normalized[(a, b)] = lagset
        self.lags: dict[Edge, frozenset[int]] = normalized
        _check_endpoints(self.lags, self.series, "lag entry")
        for (a, b), ls in self.lags.items():
            for l in ls:
                if l < 0 or l > self.max_lag:
                    raise GraphInvariantError(
                        f"lag {l} on ({a}, {b}) is outside [0, {self.max_lag}]"
                    )
            if a == b and 0 in ls:
                raise GraphInvariantError(f"instantaneous self-loop on {a}")
        inst = [e for e, ls in self.lags.items() if 0 in ls]
        if _has_cycle(self.series, inst):
            raise GraphInvariantError("instantaneous layer has a cycle")

    def key(self) -> tuple:
        """Canonical hashable form of the lag pattern."""
        return (
            tuple(sorted(self.series)),
            tuple(sorted((a, b, tuple(sorted(ls))) for (a, b), ls in self.lags.items())),
            self.max_lag,
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Ftcg):
            return NotImplemented
        return self.key() == other.key()

    def __hash__(self) -> int:
        return hash(self.key())

    def __repr__(self) -> str:
        entries = ", ".join(
            f"({a}->{b}: {sorted(ls)})" for (a, b), ls in sorted(self.lags.items())
        )
        return f"Ftcg(max_lag={self.max_lag}, {entries})"


Abstraction = Union[Scg, Escg]


def derive_scg(g: Union[Escg, Ftcg]) -> Scg:
    """Collapse an ESCG or FTCG to its summary graph."""
    if isinstance(g, Escg):
        return Scg(g.series, g.lagged_edges | g.inst_edges)
    if isinstance(g, Ftcg):
        return Scg(g.series, g.lags.keys())
    raise TypeError(f"cannot derive an SCG from {type(g).__name__}")


def derive_escg(f: Ftcg) -> Escg:
    """Collapse an FTCG to its two-slice summary."""
    lagged = {e for e, ls in f.lags.items() if any(l >= 1 for l in ls)}
    inst = {e for e, ls in f.lags.items() if 0 in ls}
    return Escg(f.series, lagged, inst)


def remove_series(g: Scg, drop: SeriesId) -> Scg:
    """The induced subgraph with one series removed."""
    if drop not in g.series:
        raise GraphInvariantError(f"cannot remove unknown series {drop}")
    keep = g.series - {drop}
    return Scg(keep, {(a, b) for a, b in g.edges if a != drop and b != drop})


def ancestors(g, v) -> set:
    """Vertices with a directed path into ``v``, including ``v`` itself.

    Works on anything exposing ``parents_of``; vertex type follows the
    graph (series names for an ``Scg``, ``TimedVertex`` for an unrolled
    graph).
    """
    seen = {v}
    frontier = [v]
    while frontier:
        u = frontier.pop()
        for p in g.parents_of(u):
            if p not in seen:
                seen.add(p)
                frontier.append(p)
    return seen


def descendants(g, v) -> set:
    """Vertices reachable from ``v`` by a directed path, including ``v``."""
    seen = {v}
    frontier = [v]
    while frontier:
        u = frontier.pop()
        for c in g.children_of(u):
            if c not in seen:
                seen.add(c)
                frontier.append(c)
    return seen


def _canonical_cycle(core: tuple[SeriesId, ...]) -> tuple[SeriesId, ...]:
    """Rotate a cycle (written without the closing repeat) so its smallest
    vertex leads, then close it."""
    k = core.index(min(core))
    rotated = core[k:] + core[:k]
    return rotated + (rotated[0],)


def cycles_through(g: Scg, v: SeriesId) -> list[tuple[SeriesId, ...]]:
    """All simple directed cycles containing ``v``, canonicalized.

    A cycle is spelled with its closing vertex repeated, starting from its
    lexicographically smallest member: a self-loop is ``(v, v)``, a mutual
    pair ``(a, b, a)``. Sorted by (length, tuple) for reproducibility.
    """
    if v not in g.series:
        raise GraphInvariantError(f"unknown series {v}")
    found: set[tuple[SeriesId, ...]] = set()
    if g.has_edge(v, v):
        found.add((v, v))

    def walk(u: SeriesId, path: tuple[SeriesId, ...]) -> None:
        for w in sorted(g.children_of(u)):
            if w == v and len(path) >= 2:
                found.add(_canonical_cycle(path))
            elif w != v and w not in path:
                walk(w, path + (w,))

    walk(v, (v,))
    return sorted(found, key=lambda c: (len(c), c))


def cycles_beyond_self(g: Scg, v: SeriesId) -> list[tuple[SeriesId, ...]]:
    """Simple directed cycles through ``v`` other than the self-loop."""
    return [c for c in cycles_through(g, v) if len(c) > 2]


def on_any_cycle(w: SeriesId, cycles: Iterable[tuple[SeriesId, ...]]) -> bool:
    """Whether ``w`` lies on at least one of the given cycles."""
    return any(w in c for c in cycles)
