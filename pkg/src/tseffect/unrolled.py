"""Finite unrolling of a full time graph, plus backdoor checking inside it.

The infinite graph of a stationary process is truncated to a window of
time offsets ``[t_min, t_max]`` around the query (offset 0 is the effect
time). The default window keeps ``lag + 2 * max_lag`` steps of history,
enough to contain every adjustment set this package emits and every path
shape that can defeat one.

``check_standard_backdoor`` decides whether a vertex set is a valid
adjustment set for one concrete candidate graph: no member may descend
from the intervened vertex, and every backdoor path from it to the effect
must be blocked. Activity is decided by a Bayes-ball sweep over the graph
with the cause's outgoing edges removed (every surviving connection then
starts with an arrow into the cause, which is exactly the backdoor path
set); a violating path certificate is recovered by depth-first search
only when one exists.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional

from .errors import GraphInvariantError, QueryError
from .graphs import Ftcg, TimedVertex, ancestors, descendants
from .paths import Mark, MarkedPath
from .query import Query


@dataclass(frozen=True)
class Window:
    """Inclusive range of time offsets, offset 0 being the effect time."""

    t_min: int
    t_max: int = 0

    def __post_init__(self) -> None:
        if self.t_min > self.t_max:
            raise GraphInvariantError(f"empty window [{self.t_min}, {self.t_max}]")

    @property
    def times(self) -> range:
        return range(self.t_min, self.t_max + 1)

    def __str__(self) -> str:
        from .graphs import offset_label

        return f"[{offset_label(self.t_min)}, {offset_label(self.t_max)}]"


def default_window(q: Query) -> Window:
    return Window(-(q.lag + 2 * q.max_lag), 0)


class TimedGraph:
    """A candidate graph unrolled over a window: a plain DAG.

    Vertices are ordered by (time, series); adjacency is kept both as
    neighbor lists (for path code) and as index bitmasks (for the fast
    sweeps).
    """

    __slots__ = ("window", "vertices", "index", "parent_masks", "child_masks")

    def __init__(self, window: Window, vertices: list[TimedVertex], edges: Iterable[tuple[int, int]]) -> None:
        self.window = window
        self.vertices: tuple[TimedVertex, ...] = tuple(vertices)
        self.index: dict[TimedVertex, int] = {v: i for i, v in enumerate(self.vertices)}
        n = len(self.vertices)
        parent_masks = [0] * n
        child_masks = [0] * n
        for a, b in edges:
            child_masks[a] |= 1 << b
            parent_masks[b] |= 1 << a
        self.parent_masks = parent_masks
        self.child_masks = child_masks

    def __len__(self) -> int:
        return len(self.vertices)

    def __contains__(self, v: TimedVertex) -> bool:
        return v in self.index

    def has_edge(self, u: TimedVertex, v: TimedVertex) -> bool:
        iu, iv = self.index.get(u), self.index.get(v)
        if iu is None or iv is None:
            return False
        return bool(self.child_masks[iu] >> iv & 1)

    def _unpack(self, mask: int) -> list[TimedVertex]:
        out = []
        i = 0
        while mask:
            if mask & 1:
                out.append(self.vertices[i])
            mask >>= 1
            i += 1
        return out

    def parents_of(self, v: TimedVertex) -> list[TimedVertex]:
        return self._unpack(self.parent_masks[self.index[v]])

    def children_of(self, v: TimedVertex) -> list[TimedVertex]:
        return self._unpack(self.child_masks[self.index[v]])

    def mask_of(self, vs: Iterable[TimedVertex]) -> int:
        m = 0
        for v in vs:
            m |= 1 << self.index[v]
        return m


def unroll(f: Ftcg, window: Window) -> TimedGraph:
    """Instantiate the repeating lag pattern over a window of offsets."""
    vertices = [
        TimedVertex(s, time)
        for time in window.times
        for s in sorted(f.series)
    ]
    index = {v: i for i, v in enumerate(vertices)}
    edges = []
    for (a, b), ls in sorted(f.lags.items()):
        for lag in sorted(ls):
            for time in window.times:
                src = TimedVertex(a, time - lag)
                if src.time >= window.t_min:
                    edges.append((index[src], index[TimedVertex(b, time)]))
    return TimedGraph(window, vertices, edges)


def _closure(masks: list[int], seed: int) -> int:
    """All vertices reachable from the seed set by repeatedly applying masks."""
    reached = seed
    frontier = seed
    while frontier:
        i = 0
        step = 0
        m = frontier
        while m:
            if m & 1:
                step |= masks[i]
            m >>= 1
            i += 1
        frontier = step & ~reached
        reached |= frontier
    return reached


def descendant_mask(tg: TimedGraph, v: TimedVertex) -> int:
    return _closure(tg.child_masks, 1 << tg.index[v])


def has_active_backdoor_walk(tg: TimedGraph, x: TimedVertex, y: TimedVertex, z: frozenset[TimedVertex]) -> bool:
    """Bayes-ball reachability from ``x`` to ``y`` given ``z``, with the
    outgoing edges of ``x`` removed.

    True exactly when some backdoor path from ``x`` to ``y`` is active
    given ``z``, provided ``z`` contains no descendant of ``x`` (callers
    check that first; with descendants of ``x`` inside ``z`` the collider
    activations of the pruned and original graphs can differ).
    """
    ix, iy = tg.index[x], tg.index[y]
    zmask = tg.mask_of(z)
    n = len(tg.vertices)
    child_masks = list(tg.child_masks)
    parent_masks = list(tg.parent_masks)
    # Remove x's outgoing edges.
    for i in range(n):
        parent_masks[i] &= ~(1 << ix)
    child_masks[ix] = 0

    # States: visited "from child" (up) and "from parent" (down) sets.
    up = 1 << ix
    down = 0
    pending = [(ix, True)]
    while pending:
        i, from_child = pending.pop()
        bit = 1 << i
        in_z = bool(zmask & bit)
        if from_child:
            if not in_z:
                targets_up = parent_masks[i]
                targets_down = child_masks[i]
            else:
                continue
        else:
            if not in_z:
                targets_up = 0
                targets_down = child_masks[i]
            else:
                targets_up = parent_masks[i]
                targets_down = 0
        new_up = targets_up & ~up
        new_down = targets_down & ~down
        if (new_up | new_down) >> iy & 1:
            return True
        up |= new_up
        down |= new_down
        j = 0
        m = new_up
        while m:
            if m & 1:
                pending.append((j, True))
            m >>= 1
            j += 1
        j = 0
        m = new_down
        while m:
            if m & 1:
                pending.append((j, False))
            m >>= 1
            j += 1
    return False


def find_active_backdoor_path(
    tg: TimedGraph, x: TimedVertex, y: TimedVertex, z: frozenset[TimedVertex]
) -> Optional[MarkedPath]:
    """The first (depth-first, sorted neighbors) backdoor path from ``x``
    to ``y`` active given ``z``, or None.

    Same descendant precondition as ``has_active_backdoor_walk``.
    """
    anc_z: set[TimedVertex] = set()
    for m in z:
        anc_z |= ancestors(tg, m)

    def extend(path: list[TimedVertex], marks: list[Mark]) -> Optional[MarkedPath]:
        u = path[-1]
        last_mark = marks[-1] if marks else Mark.BACKWARD
        for w, step in _sorted_steps(tg, u):
            if w in path:
                continue
            if len(path) >= 2:
                # Leaving u finalizes its interior status.
                collider = last_mark is Mark.FORWARD and step is Mark.BACKWARD
                if collider:
                    if u not in anc_z:
                        continue
                elif u in z:
                    continue
            elif step is not Mark.BACKWARD:
                continue  # first step must enter a parent of x
            if w == y:
                return MarkedPath(path + [w], marks + [step])
            result = extend(path + [w], marks + [step])
            if result is not None:
                return result
        return None

    return extend([x], [])


def _sorted_steps(tg: TimedGraph, u: TimedVertex) -> list[tuple[TimedVertex, Mark]]:
    steps = [(w, Mark.FORWARD) for w in tg.children_of(u)]
    steps += [(w, Mark.BACKWARD) for w in tg.parents_of(u)]
    return sorted(steps, key=lambda s: (s[0], s[1].value))


@dataclass(frozen=True)
class BackdoorViolation:
    """Why a set fails the standard backdoor criterion in one candidate."""

    kind: str  # "descendant_in_set" or "active_backdoor_path"
    vertex: Optional[TimedVertex] = None
    path: Optional[MarkedPath] = None

    def describe(self) -> str:
        if self.kind == "descendant_in_set":
            return f"{self.vertex.label()} descends from the intervened vertex"
        return f"active backdoor path {self.path}"


def check_standard_backdoor(
    f: Ftcg, q: Query, z: frozenset[TimedVertex], window: Optional[Window] = None
) -> Optional[BackdoorViolation]:
    """Standard backdoor criterion for one candidate graph over a window.

    Returns None when ``z`` is valid for the query in ``f``; otherwise a
    violation naming the offending descendant or an active backdoor path.
    """
    if window is None:
        window = default_window(q)
    q.check_series(f.series)
    tg = unroll(f, window)
    x, y = q.cause_vertex, q.effect_vertex
    if x not in tg or y not in tg:
        raise QueryError(f"query vertices fall outside the window {window}")
    for v in z:
        if v not in tg:
            raise QueryError(f"conditioning vertex {v.label()} is outside the window {window}")
    if x in z or y in z:
        raise QueryError("conditioning set may not contain the query vertices")
    desc_x = descendants(tg, x)
    bad = sorted(set(z) & desc_x)
    if bad:
        return BackdoorViolation("descendant_in_set", vertex=bad[0])
    if has_active_backdoor_walk(tg, x, y, z):
        path = find_active_backdoor_path(tg, x, y, z)
        if path is None:
            raise RuntimeError("walk check found activity but no path certificate exists")
        return BackdoorViolation("active_backdoor_path", path=path)
    return None
