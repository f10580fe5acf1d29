"""Identification from a summary graph alone.

The summary graph hides lags, so some queries cannot be certified: a
cycle through the cause (other than its self-loop) that survives removing
the effect, or an active backdoor path running entirely through possible
descendants of the cause, leaves candidate full time graphs that disagree.
Outside those obstructions, the recent history of every series, taken
strictly before the intervention for possible descendants of the cause,
adjusts the effect in every candidate.

Two independent deciders are provided. ``identify_scg`` excludes the
obstructions one by one and reports a witness for the first that fires;
``identify_scg_disjunctive`` re-derives the verdict from an equivalent
positive formulation (three sufficient clauses joined by "or"). They must
always agree on identifiability; the test suite holds them to that.
"""

from __future__ import annotations

from typing import Iterator, Optional

from .graphs import (
    Scg,
    SeriesId,
    TimedVertex,
    ancestors,
    cycles_beyond_self,
    cycles_through,
    descendants,
    remove_series,
)
from .paths import MarkedPath, enumerate_simple_paths, is_backdoor, is_sigma_active_empty
from .query import NotCoveredWitness, Query, Verdict, VerdictKind, WitnessReason


def history_adjustment(g: Scg, q: Query) -> frozenset[TimedVertex]:
    """Recent history of every series, kept clear of the cause's influence.

    Possible descendants of the cause enter at offsets
    ``-(lag+1) .. -(lag+max_lag)``; every other series also enters at the
    intervention offset ``-lag``.
    """
    q.check_series(g.series)
    desc = descendants(g, q.cause)
    out: set[TimedVertex] = set()
    for s in g.series:
        start = 1 if s in desc else 0
        for l in range(start, q.max_lag + 1):
            out.add(TimedVertex(s, -q.lag - l))
    return frozenset(out)


def ancestral_history_adjustment(g: Scg, q: Query) -> frozenset[TimedVertex]:
    """``history_adjustment`` cut down to ancestors of the cause or effect."""
    keep = ancestors(g, q.cause) | ancestors(g, q.effect)
    return frozenset(v for v in history_adjustment(g, q) if v.series in keep)


def _two_cycle(a: SeriesId, b: SeriesId) -> tuple[SeriesId, ...]:
    lo, hi = sorted((a, b))
    return (lo, hi, lo)


def active_descendant_backdoors(g: Scg, q: Query) -> Iterator[MarkedPath]:
    """Backdoor paths from cause to effect that stay active with nothing
    conditioned and run entirely through possible descendants of the cause,
    in depth-first order."""
    desc = descendants(g, q.cause)
    for p in enumerate_simple_paths(g, q.cause, q.effect):
        if not is_backdoor(p) or not is_sigma_active_empty(p):
            continue
        if all(v in desc for v in p.interior):
            yield p


def _extra_effect_cycles(g: Scg, q: Query) -> list[tuple[SeriesId, ...]]:
    pair = _two_cycle(q.cause, q.effect)
    return [c for c in cycles_through(g, q.effect) if c != pair]


def identify_scg(g: Scg, q: Query) -> Verdict:
    """Decide the query from the summary graph, with witnesses.

    NOT_COVERED verdicts mean the sufficient conditions stop short, not
    that the effect is proven unidentifiable.
    """
    q.check_series(g.series)
    if q.cause not in ancestors(g, q.effect):
        return Verdict(VerdictKind.IDENTIFIABLE_TRIVIAL, q)

    if q.lag != 0:
        cycles = cycles_beyond_self(remove_series(g, q.effect), q.cause)
        if cycles:
            return Verdict(
                VerdictKind.NOT_COVERED,
                q,
                witness=NotCoveredWitness(WitnessReason.CYCLE_THROUGH_CAUSE, cycle=cycles[0]),
            )

    for p in active_descendant_backdoors(g, q):
        if len(p.vertices) > 2:
            return Verdict(
                VerdictKind.NOT_COVERED,
                q,
                witness=NotCoveredWitness(WitnessReason.ACTIVE_BACKDOOR_LONG, path=p),
            )
        if q.lag != 1:
            return Verdict(
                VerdictKind.NOT_COVERED,
                q,
                witness=NotCoveredWitness(WitnessReason.ACTIVE_BACKDOOR_WRONG_LAG, path=p),
            )
        extra = _extra_effect_cycles(g, q)
        if extra:
            return Verdict(
                VerdictKind.NOT_COVERED,
                q,
                witness=NotCoveredWitness(
                    WitnessReason.ACTIVE_BACKDOOR_CYCLE, cycle=extra[0], path=p
                ),
            )

    return Verdict(
        VerdictKind.IDENTIFIABLE_BY_ADJUSTMENT,
        q,
        adjustments={
            "history_adjustment": history_adjustment(g, q),
            "ancestral_history_adjustment": ancestral_history_adjustment(g, q),
        },
    )


def identify_scg_disjunctive(g: Scg, q: Query) -> Verdict:
    """Same verdict as ``identify_scg``, from the positive formulation.

    Identifiable exactly when the cause misses the effect, or one of:

    1. no cycle through the cause beyond its self-loop once the effect is
       removed, and no qualifying backdoor path;
    2. lag 0 and no qualifying backdoor path;
    3. no such cycle, some qualifying backdoor path is the two-vertex one,
       lag is 1, and the effect lies on no cycle beyond the mutual pair.

    Kept deliberately separate from ``identify_scg`` so the two can be
    played against each other in tests. No witness is produced.
    """
    q.check_series(g.series)
    if q.cause not in ancestors(g, q.effect):
        return Verdict(VerdictKind.IDENTIFIABLE_TRIVIAL, q)

    qualifying = list(active_descendant_backdoors(g, q))
    no_cycles = not cycles_beyond_self(remove_series(g, q.effect), q.cause)

    identifiable = (
        (no_cycles and not qualifying)
        or (q.lag == 0 and not qualifying)
        or (
            no_cycles
            and any(len(p.vertices) == 2 for p in qualifying)
            and q.lag == 1
            and not _extra_effect_cycles(g, q)
        )
    )
    if not identifiable:
        return Verdict(VerdictKind.NOT_COVERED, q)
    return Verdict(
        VerdictKind.IDENTIFIABLE_BY_ADJUSTMENT,
        q,
        adjustments={
            "history_adjustment": history_adjustment(g, q),
            "ancestral_history_adjustment": ancestral_history_adjustment(g, q),
        },
    )
