"""Brute-force certification against every candidate full time graph.

A summary abstraction stands for a whole family of full time graphs. The
deciders in ``scg.py`` and ``escg.py`` reason about that family wholesale;
this module instead enumerates it and checks claims one candidate at a
time, which is what the test suite trusts most.

Candidate enumeration is deterministic. Ordered series pairs are sorted;
each pair carries an ordered list of admissible lag sets (encoded as
bitmasks, ascending); candidates are the mixed-radix product with the last
pair varying fastest. For a summary graph the instantaneous layer must
stay acyclic, so enumeration is grouped into blocks: one per acyclic
subset of pairs allowed to carry lag 0, subsets visited in ascending
bitmask order over the sorted pair list. Every check reports the index of
the first failing candidate under this order, and ``candidate_at`` can
decode any index back into its graph.

Each check runs on two engines. ``python`` walks unrolled graphs through
the object layer; ``bitset`` drives the compiled sweeps in ``_bitgraph``
and then re-verifies any hit through the object layer. They must agree;
disagreement raises rather than returning anything.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Optional, Sequence, Union

import numpy as np

from .errors import QueryError, ResourceCapError
from .graphs import (
    Edge,
    Escg,
    Ftcg,
    Scg,
    TimedVertex,
    _has_cycle,
    ancestors,
    cycles_beyond_self,
    cycles_through,
    descendants,
    remove_series,
)
from .paths import MarkedPath, enumerate_simple_paths, is_backdoor, marked_path
from .query import Query
from .scg import active_descendant_backdoors, history_adjustment
from .unrolled import (
    BackdoorViolation,
    Window,
    check_standard_backdoor,
    default_window,
    unroll,
)

Abstraction = Union[Scg, Escg]

_BITSET_LIMIT = 62


@dataclass(frozen=True)
class Caps:
    """Hard limits on exhaustive work; exceeding one raises, never truncates."""

    max_candidates: int = 1_000_000
    max_subsets: int = 1_000_000
    max_paths: int = 100_000


@dataclass(frozen=True)
class _Block:
    """One enumeration block: fixed lag-0 membership, free lag choices."""

    pairs: tuple[Edge, ...]
    choices: tuple[tuple[int, ...], ...]

    @property
    def size(self) -> int:
        out = 1
        for c in self.choices:
            out *= len(c)
        return out


def _nonzero_masks(gamma_max: int) -> tuple[int, ...]:
    return tuple(s << 1 for s in range(1, 1 << gamma_max))


def _zero_any_masks(gamma_max: int) -> tuple[int, ...]:
    return tuple(1 | (s << 1) for s in range(1 << gamma_max))


def _zero_nonzero_masks(gamma_max: int) -> tuple[int, ...]:
    return tuple(1 | (s << 1) for s in range(1, 1 << gamma_max))


def candidate_blocks(a: Abstraction, gamma_max: int) -> list[_Block]:
    """The enumeration blocks for an abstraction, in canonical order."""
    if gamma_max < 1:
        raise QueryError(f"max_lag must be at least 1, got {gamma_max}")
    if isinstance(a, Escg):
        pairs = tuple(sorted(a.lagged_edges | a.inst_edges))
        choices = []
        for p in pairs:
            lagged = p in a.lagged_edges
            inst = p in a.inst_edges
            if lagged and inst:
                choices.append(_zero_nonzero_masks(gamma_max))
            elif lagged:
                choices.append(_nonzero_masks(gamma_max))
            else:
                choices.append((1,))
        return [_Block(pairs, tuple(choices))]
    if isinstance(a, Scg):
        pairs = tuple(sorted(a.edges))
        zero_capable = [p for p in pairs if p[0] != p[1]]
        blocks = []
        for dbits in range(1 << len(zero_capable)):
            in_zero = {p for i, p in enumerate(zero_capable) if (dbits >> i) & 1}
            if _has_cycle(a.series, in_zero):
                continue
            choices = []
            for p in pairs:
                if p[0] == p[1]:
                    choices.append(_nonzero_masks(gamma_max))
                elif p in in_zero:
                    choices.append(_zero_any_masks(gamma_max))
                else:
                    choices.append(_nonzero_masks(gamma_max))
            blocks.append(_Block(pairs, tuple(choices)))
        return blocks
    raise TypeError(f"cannot enumerate candidates of {type(a).__name__}")


def count_candidates(a: Abstraction, gamma_max: int, caps: Optional[Caps] = None) -> int:
    caps = caps or Caps()
    total = sum(b.size for b in candidate_blocks(a, gamma_max))
    if total > caps.max_candidates:
        raise ResourceCapError(
            f"{total} candidate graphs exceed the cap of {caps.max_candidates}",
            needed=total,
            cap=caps.max_candidates,
        )
    return total


def _mask_to_lags(mask: int, gamma_max: int) -> frozenset[int]:
    return frozenset(l for l in range(gamma_max + 1) if (mask >> l) & 1)


def _build_candidate(a: Abstraction, block: _Block, combo: Sequence[int], gamma_max: int) -> Ftcg:
    lags = {p: _mask_to_lags(m, gamma_max) for p, m in zip(block.pairs, combo)}
    return Ftcg(a.series, lags, gamma_max)


def enumerate_candidates(
    a: Abstraction, gamma_max: int, caps: Optional[Caps] = None
) -> Iterator[Ftcg]:
    """Every candidate graph, in the canonical order; cap checked up front."""
    count_candidates(a, gamma_max, caps)
    blocks = candidate_blocks(a, gamma_max)

    def produce() -> Iterator[Ftcg]:
        for block in blocks:
            for combo in itertools.product(*block.choices):
                yield _build_candidate(a, block, combo, gamma_max)

    return produce()


def candidate_at(a: Abstraction, gamma_max: int, index: int) -> Ftcg:
    """Decode a global candidate index back into its graph."""
    remaining = index
    for block in candidate_blocks(a, gamma_max):
        if remaining >= block.size:
            remaining -= block.size
            continue
        combo = [0] * len(block.pairs)
        local = remaining
        for p in reversed(range(len(block.pairs))):
            width = len(block.choices[p])
            combo[p] = block.choices[p][local % width]
            local //= width
        return _build_candidate(a, block, combo, gamma_max)
    raise IndexError(f"candidate index {index} out of range")


# --- bitset plumbing -------------------------------------------------------


class _WindowLayout:
    """Vertex numbering and edge placements shared by the compiled sweeps.

    Mirrors ``unroll`` exactly: vertices ordered by (time, series), index
    ``(time - t_min) * n_series + series_rank``.
    """

    def __init__(self, a: Abstraction, gamma_max: int, window: Window, pairs: tuple[Edge, ...]):
        self.series_sorted = sorted(a.series)
        self.window = window
        self.gamma_max = gamma_max
        ns = len(self.series_sorted)
        times = list(window.times)
        self.n = ns * len(times)
        if self.n > _BITSET_LIMIT:
            raise ResourceCapError(
                f"window graph has {self.n} vertices; the bitset engine handles "
                f"at most {_BITSET_LIMIT}",
                needed=self.n,
                cap=_BITSET_LIMIT,
            )
        self.rank = {s: i for i, s in enumerate(self.series_sorted)}
        self.vtime = np.array([window.t_min + i // ns for i in range(self.n)], np.int64)
        self.series_of = np.array([i % ns for i in range(self.n)], np.int64)
        off = [0]
        src: list[int] = []
        dst: list[int] = []
        for (p_a, p_b) in pairs:
            for lag in range(gamma_max + 1):
                for t in times:
                    ts = t - lag
                    if ts >= window.t_min:
                        src.append(self.vertex_index(TimedVertex(p_a, ts)))
                        dst.append(self.vertex_index(TimedVertex(p_b, t)))
                off.append(len(src))
        self.pl_off = np.array(off, np.int64)
        self.pl_src = np.array(src, np.int64)
        self.pl_dst = np.array(dst, np.int64)

    def vertex_index(self, v: TimedVertex) -> int:
        ns = len(self.series_sorted)
        return (v.time - self.window.t_min) * ns + self.rank[v.series]

    def vertex_at(self, index: int) -> TimedVertex:
        ns = len(self.series_sorted)
        return TimedVertex(self.series_sorted[index % ns], self.window.t_min + index // ns)

    def mask_of(self, vs: frozenset[TimedVertex]) -> int:
        out = 0
        for v in vs:
            out |= 1 << self.vertex_index(v)
        return out

    def choice_arrays(self, block: _Block) -> tuple[np.ndarray, np.ndarray]:
        off = [0]
        masks: list[int] = []
        for c in block.choices:
            masks.extend(c)
            off.append(len(masks))
        return np.array(off, np.int64), np.array(masks, np.int64)


def _pick_engine(engine: str, a: Abstraction, window: Window) -> str:
    if engine not in ("auto", "bitset", "python"):
        raise ValueError(f"unknown engine {engine!r}")
    if engine != "auto":
        return engine
    n = len(a.series) * len(list(window.times))
    return "bitset" if n <= _BITSET_LIMIT else "python"


def _validate_set(a: Abstraction, q: Query, z: frozenset[TimedVertex], window: Window) -> None:
    q.check_series(a.series)
    for v in (q.cause_vertex, q.effect_vertex):
        if v.time < window.t_min or v.time > window.t_max:
            raise QueryError(f"query vertex {v.label()} is outside the window {window}")
    for v in z:
        if v.series not in a.series:
            raise QueryError(f"conditioning vertex {v.label()} names an unknown series")
        if v.time < window.t_min or v.time > window.t_max:
            raise QueryError(f"conditioning vertex {v.label()} is outside the window {window}")
    if q.cause_vertex in z or q.effect_vertex in z:
        raise QueryError("conditioning set may not contain the query vertices")


# --- backdoor validity over the whole family -------------------------------


@dataclass(frozen=True)
class CandidateViolation:
    """One candidate graph on which a claimed adjustment set fails."""

    candidate: Ftcg
    index: int
    violation: BackdoorViolation

    def describe(self) -> str:
        return f"candidate #{self.index} {self.candidate!r}: {self.violation.describe()}"


@dataclass(frozen=True)
class OracleResult:
    passed: bool
    candidates: int
    window: Window
    counterexample: Optional[CandidateViolation] = None

    def describe(self) -> str:
        if self.passed:
            return f"valid in all {self.candidates} candidate graphs over {self.window}"
        return f"fails: {self.counterexample.describe()}"


def backdoor_over_all(
    a: Abstraction,
    q: Query,
    z: frozenset[TimedVertex],
    window: Optional[Window] = None,
    caps: Optional[Caps] = None,
    engine: str = "auto",
) -> OracleResult:
    """Whether ``z`` satisfies the standard backdoor criterion in every
    candidate graph, unrolled over the window."""
    caps = caps or Caps()
    window = window or default_window(q)
    _validate_set(a, q, z, window)
    total = count_candidates(a, q.max_lag, caps)
    blocks = candidate_blocks(a, q.max_lag)
    engine = _pick_engine(engine, a, window)

    if engine == "python":
        for index, cand in enumerate(enumerate_candidates(a, q.max_lag, caps)):
            violation = check_standard_backdoor(cand, q, z, window)
            if violation is not None:
                return OracleResult(False, total, window, CandidateViolation(cand, index, violation))
        return OracleResult(True, total, window)

    from . import _bitgraph

    pairs = blocks[0].pairs if blocks else ()
    layout = _WindowLayout(a, q.max_lag, window, pairs)
    ix = layout.vertex_index(q.cause_vertex)
    iy = layout.vertex_index(q.effect_vertex)
    zmask = layout.mask_of(z)
    base = 0
    for block in blocks:
        ch_off, ch_masks = layout.choice_arrays(block)
        flat, _kind = _bitgraph.check_block(
            layout.n, ix, iy, zmask, len(block.pairs), q.max_lag + 1,
            ch_off, ch_masks, layout.pl_off, layout.pl_src, layout.pl_dst,
        )
        if flat >= 0:
            index = base + int(flat)
            cand = candidate_at(a, q.max_lag, index)
            violation = check_standard_backdoor(cand, q, z, window)
            if violation is None:
                raise RuntimeError(
                    "bitset sweep flagged a candidate that the object layer clears"
                )
            return OracleResult(False, total, window, CandidateViolation(cand, index, violation))
        base += block.size
    return OracleResult(True, total, window)


def search_common_adjustment(
    a: Abstraction,
    q: Query,
    window: Optional[Window] = None,
    caps: Optional[Caps] = None,
    engine: str = "auto",
) -> Optional[frozenset[TimedVertex]]:
    """The first vertex set valid in every candidate graph, or None.

    Subsets of the window grid (query vertices excluded) are tried by
    ascending size, ties broken lexicographically over vertices ordered by
    (time, series). A returned set certifies identifiability by itself;
    None means no adjustment set exists within this window.
    """
    caps = caps or Caps()
    window = window or default_window(q)
    q.check_series(a.series)
    grid = [
        TimedVertex(s, t)
        for t in window.times
        for s in sorted(a.series)
    ]
    grid = [v for v in grid if v not in (q.cause_vertex, q.effect_vertex)]
    tried = 0
    for k in range(len(grid) + 1):
        for combo in itertools.combinations(grid, k):
            tried += 1
            if tried > caps.max_subsets:
                raise ResourceCapError(
                    f"subset search passed the cap of {caps.max_subsets}",
                    needed=tried,
                    cap=caps.max_subsets,
                )
            result = backdoor_over_all(a, q, frozenset(combo), window, caps, engine)
            if result.passed:
                return frozenset(combo)
    return None


# --- ambiguity and compatibility -------------------------------------------


def is_ambiguous_path(p: MarkedPath, q: Query) -> bool:
    """Whether the path stays at or after the intervention time throughout.

    Such a path contains no vertex whose time already places it outside
    the cause's possible influence, which is what makes its blocking status
    depend on the candidate rather than on the summary alone.
    """
    return all(v.time >= -q.lag for v in p.vertices)


def allowed_interior_series(p_s: MarkedPath, g: Scg) -> frozenset[str]:
    """Series that a candidate path compatible with ``p_s`` may visit as
    interior vertices: the interiors of ``p_s`` itself, plus anything on a
    cycle through one of them that avoids the path's first vertex."""
    cause = p_s.vertices[0]
    allowed = set(p_s.interior)
    for v in p_s.interior:
        for cyc in cycles_through(g, v):
            if cause not in cyc:
                allowed.update(cyc)
    return frozenset(allowed)


def is_compatible(p_f: MarkedPath, p_s: MarkedPath, g: Scg) -> bool:
    """Whether every interior vertex of the unrolled path ``p_f`` runs
    through series that the summary path ``p_s`` can account for."""
    allowed = allowed_interior_series(p_s, g)
    return all(v.series in allowed for v in p_f.interior)


def classify_ambiguous(
    a: Abstraction,
    q: Query,
    v: TimedVertex,
    window: Optional[Window] = None,
    caps: Optional[Caps] = None,
) -> bool:
    """Whether ``v`` sits on a collider-free backdoor path in one candidate
    while descending from the intervened vertex in a different one.

    Such a vertex cannot be safely conditioned on from the summary alone:
    one member of the family wants it in the adjustment set and another
    forbids it.
    """
    caps = caps or Caps()
    window = window or default_window(q)
    q.check_series(a.series)
    if v.time < window.t_min or v.time > window.t_max:
        raise QueryError(f"vertex {v.label()} is outside the window {window}")
    x, y = q.cause_vertex, q.effect_vertex
    on_backdoor: list[int] = []
    descends: list[int] = []
    for index, cand in enumerate(enumerate_candidates(a, q.max_lag, caps)):
        tg = unroll(cand, window)
        if len(on_backdoor) < 2 and _on_open_backdoor(tg, x, y, v, caps):
            on_backdoor.append(index)
        if len(descends) < 2 and v in descendants(tg, x):
            descends.append(index)
        if on_backdoor and descends:
            distinct = (
                on_backdoor[0] != descends[0]
                or len(on_backdoor) > 1
                or len(descends) > 1
            )
            if distinct:
                return True
    return False


def _on_open_backdoor(tg, x, y, v, caps: Caps) -> bool:
    from .paths import _strict_collider

    for p in enumerate_simple_paths(tg, x, y, cap=caps.max_paths):
        if not is_backdoor(p) or v not in p.interior:
            continue
        open_path = not any(
            _strict_collider(p.marks[i - 1], p.marks[i])
            for i in range(1, len(p.vertices) - 1)
        )
        if open_path:
            return True
    return False


# --- diagnostic sweeps over the blocking machinery --------------------------


@dataclass(frozen=True)
class BlockingCounterexample:
    candidate: Ftcg
    index: int
    path: Optional[MarkedPath]
    note: str

    def describe(self) -> str:
        where = f" along {self.path}" if self.path is not None else ""
        return f"candidate #{self.index} {self.candidate!r}: {self.note}{where}"


@dataclass(frozen=True)
class EarlyBlockingResult:
    passed: bool
    candidates: int
    window: Window
    counterexample: Optional[BlockingCounterexample] = None


def check_early_blocking(
    g: Scg,
    q: Query,
    window: Optional[Window] = None,
    caps: Optional[Caps] = None,
    engine: str = "auto",
) -> EarlyBlockingResult:
    """Verify, over every candidate, that each backdoor path reaching a
    vertex before the intervention time is blocked inside the history
    adjustment set.

    The first vertex of such a path to slip before the intervention time
    is entered against an edge pointing forward in time, so it is a
    non-collider there; lags are bounded, so it lands within ``max_lag``
    steps of the intervention time, a band where the history adjustment
    set holds every series. The bitset engine certifies those two facts
    for every edge crossing the boundary in every candidate; the python
    engine instead enumerates the paths themselves and exhibits a blocking
    vertex on each. Both report the first candidate where the argument
    would break, which no graph can produce.
    """
    caps = caps or Caps()
    q.check_series(g.series)
    window = window or default_window(q)
    total = count_candidates(g, q.max_lag, caps)
    blocks = candidate_blocks(g, q.max_lag)
    engine = _pick_engine(engine, g, window)

    adj = history_adjustment(g, q)
    band = {
        TimedVertex(s, -q.lag - l)
        for s in g.series
        for l in range(1, q.max_lag + 1)
    }
    if not band <= adj:
        raise RuntimeError("history adjustment set no longer covers its band")

    if engine == "python":
        x, y = q.cause_vertex, q.effect_vertex
        for index, cand in enumerate(enumerate_candidates(g, q.max_lag, caps)):
            tg = unroll(cand, window)
            for p in enumerate_simple_paths(tg, x, y, cap=caps.max_paths):
                if not is_backdoor(p) or is_ambiguous_path(p, q):
                    continue
                blocker = _early_blocker(p, q, adj)
                if blocker is None:
                    return EarlyBlockingResult(
                        False, total, window,
                        BlockingCounterexample(
                            cand, index, p,
                            "no early vertex of the adjustment set blocks this path",
                        ),
                    )
        return EarlyBlockingResult(True, total, window)

    from . import _bitgraph

    pairs = blocks[0].pairs if blocks else ()
    layout = _WindowLayout(g, q.max_lag, window, pairs)
    base = 0
    for block in blocks:
        ch_off, ch_masks = layout.choice_arrays(block)
        flat, kind = _bitgraph.early_blocking_block(
            layout.n, layout.vtime, q.lag, q.max_lag, len(block.pairs), q.max_lag + 1,
            ch_off, ch_masks, layout.pl_off, layout.pl_src, layout.pl_dst,
        )
        if flat >= 0:
            index = base + int(flat)
            cand = candidate_at(g, q.max_lag, index)
            note = (
                "a boundary-crossing edge starts outside the adjustment band"
                if kind == 1
                else "an edge runs against time"
            )
            return EarlyBlockingResult(
                False, total, window, BlockingCounterexample(cand, index, None, note)
            )
        base += block.size
    return EarlyBlockingResult(True, total, window)


def _early_blocker(p: MarkedPath, q: Query, adj: frozenset[TimedVertex]) -> Optional[TimedVertex]:
    from .paths import _strict_collider

    for i in range(1, len(p.vertices) - 1):
        v = p.vertices[i]
        if v.time > -q.lag - 1 or v not in adj:
            continue
        if not _strict_collider(p.marks[i - 1], p.marks[i]):
            return v
    return None


@dataclass(frozen=True)
class CompatibilityResult:
    """Outcome of the ambiguous-path compatibility sweep.

    ``applicable`` is False when the summary graph falls outside the
    claim's premise, in which case nothing was swept.
    """

    applicable: bool
    passed: bool
    candidates: int
    window: Window
    counterexample: Optional[BlockingCounterexample] = None


def check_ambiguous_compatibility(
    g: Scg,
    q: Query,
    window: Optional[Window] = None,
    caps: Optional[Caps] = None,
    engine: str = "auto",
) -> CompatibilityResult:
    """Sweep for a backdoor path confined to the intervention time and
    later whose interior series escape every summary-graph backdoor path.

    The claim under test: when the cause reaches the effect, no cycle
    beyond a self-loop runs through the cause once the effect is removed
    (unless the lag is 0), and no collider-free backdoor path runs
    entirely through possible descendants of the cause, then every such
    confined path can be accounted for by some summary backdoor path.
    This claim is falsifiable and the suite documents concrete refutations;
    see the package README.
    """
    caps = caps or Caps()
    q.check_series(g.series)
    window = window or default_window(q)
    total = count_candidates(g, q.max_lag, caps)
    engine = _pick_engine(engine, g, window)

    applicable = (
        q.cause in ancestors(g, q.effect)
        and (q.lag == 0 or not cycles_beyond_self(remove_series(g, q.effect), q.cause))
        and next(iter(active_descendant_backdoors(g, q)), None) is None
    )
    if not applicable:
        return CompatibilityResult(False, True, 0, window)

    summary_backdoors = [
        p for p in enumerate_simple_paths(g, q.cause, q.effect, cap=caps.max_paths)
        if is_backdoor(p)
    ]
    x, y = q.cause_vertex, q.effect_vertex

    if engine == "python":
        for index, cand in enumerate(enumerate_candidates(g, q.max_lag, caps)):
            tg = unroll(cand, window)
            for p in enumerate_simple_paths(tg, x, y, cap=caps.max_paths):
                if not is_backdoor(p) or not is_ambiguous_path(p, q):
                    continue
                if not any(is_compatible(p, ps, g) for ps in summary_backdoors):
                    return CompatibilityResult(
                        True, False, total, window,
                        BlockingCounterexample(
                            cand, index, p,
                            "ambiguous backdoor path no summary backdoor path accounts for",
                        ),
                    )
        return CompatibilityResult(True, True, total, window)

    from . import _bitgraph

    blocks = candidate_blocks(g, q.max_lag)
    pairs = blocks[0].pairs if blocks else ()
    layout = _WindowLayout(g, q.max_lag, window, pairs)
    ix = layout.vertex_index(x)
    iy = layout.vertex_index(y)
    region = 0
    for i in range(layout.n):
        if layout.vtime[i] >= -q.lag:
            region |= 1 << i
    series_rank = {s: i for i, s in enumerate(layout.series_sorted)}
    allowed = np.array(
        [
            sum(1 << series_rank[s] for s in allowed_interior_series(ps, g))
            for ps in summary_backdoors
        ],
        np.int64,
    )
    out_path = np.zeros(layout.n + 1, np.int64)
    base = 0
    for block in blocks:
        ch_off, ch_masks = layout.choice_arrays(block)
        flat, plen = _bitgraph.incompatible_ambiguous_block(
            layout.n, ix, iy, np.int64(region), layout.series_of,
            len(summary_backdoors), allowed, out_path,
            len(block.pairs), q.max_lag + 1,
            ch_off, ch_masks, layout.pl_off, layout.pl_src, layout.pl_dst,
        )
        if flat >= 0:
            index = base + int(flat)
            cand = candidate_at(g, q.max_lag, index)
            tg = unroll(cand, window)
            vs = [layout.vertex_at(int(out_path[k])) for k in range(int(plen))]
            p = marked_path(tg, vs)
            sound = (
                is_backdoor(p)
                and is_ambiguous_path(p, q)
                and not any(is_compatible(p, ps, g) for ps in summary_backdoors)
            )
            if not sound:
                raise RuntimeError(
                    "bitset sweep produced a path the object layer does not confirm"
                )
            return CompatibilityResult(
                True, False, total, window,
                BlockingCounterexample(
                    cand, index, p,
                    "ambiguous backdoor path no summary backdoor path accounts for",
                ),
            )
        base += block.size
    return CompatibilityResult(True, True, total, window)
