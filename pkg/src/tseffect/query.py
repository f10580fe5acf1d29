"""Queries and verdicts.

A query asks for the total causal effect of one series on another at a
fixed lag: intervene on ``cause`` at time ``t - lag``, read ``effect`` at
time ``t``. ``max_lag`` bounds the edge lags of the underlying process and
therefore the candidate graphs considered.

A verdict is one of:

- ``IDENTIFIABLE_TRIVIAL``: the intervention cannot reach the effect in
  any candidate graph, so the interventional distribution equals the
  observational marginal.
- ``IDENTIFIABLE_BY_ADJUSTMENT``: the returned adjustment sets are valid in
  every candidate full time graph.
- ``NOT_COVERED``: the sufficient conditions do not certify this query.
  This is *not* a proof of non-identifiability; the witness records which
  condition fired.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional

from .errors import QueryError
from .graphs import SeriesId, TimedVertex
from .paths import MarkedPath


@dataclass(frozen=True)
class Query:
    cause: SeriesId
    effect: SeriesId
    lag: int
    max_lag: int

    def __post_init__(self) -> None:
        if self.cause == self.effect:
            raise QueryError("cause and effect must be distinct series")
        if self.lag < 0:
            raise QueryError(f"lag must be nonnegative, got {self.lag}")
        if self.max_lag < 1:
            raise QueryError(f"max_lag must be at least 1, got {self.max_lag}")

    @property
    def cause_vertex(self) -> TimedVertex:
        return TimedVertex(self.cause, -self.lag)

    @property
    def effect_vertex(self) -> TimedVertex:
        return TimedVertex(self.effect, 0)

    def check_series(self, series: frozenset[SeriesId]) -> None:
        for s in (self.cause, self.effect):
            if s not in series:
                raise QueryError(f"query series {s} is not in the graph")


class VerdictKind(enum.Enum):
    IDENTIFIABLE_TRIVIAL = "identifiable_trivial"
    IDENTIFIABLE_BY_ADJUSTMENT = "identifiable_by_adjustment"
    NOT_COVERED = "not_covered"


class WitnessReason(enum.Enum):
    CYCLE_THROUGH_CAUSE = "cycle_through_cause"
    ACTIVE_BACKDOOR_LONG = "active_backdoor_long"
    ACTIVE_BACKDOOR_WRONG_LAG = "active_backdoor_wrong_lag"
    ACTIVE_BACKDOOR_CYCLE = "active_backdoor_cycle"


@dataclass(frozen=True)
class NotCoveredWitness:
    """What stopped certification: a cycle, a backdoor path, or both."""

    reason: WitnessReason
    cycle: Optional[tuple[SeriesId, ...]] = None
    path: Optional[MarkedPath] = None

    def describe(self) -> str:
        bits = []
        if self.reason is WitnessReason.CYCLE_THROUGH_CAUSE:
            bits.append(f"cycle through the cause survives removing the effect: {'-'.join(self.cycle)}")
        elif self.reason is WitnessReason.ACTIVE_BACKDOOR_LONG:
            bits.append(f"active backdoor path through descendants of the cause: {self.path}")
        elif self.reason is WitnessReason.ACTIVE_BACKDOOR_WRONG_LAG:
            bits.append(f"mutual edge between cause and effect at lag != 1: {self.path}")
        else:
            bits.append(
                f"mutual edge between cause and effect plus a further cycle "
                f"through the effect: {self.path}; cycle {'-'.join(self.cycle)}"
            )
        return "; ".join(bits)


@dataclass(frozen=True)
class Verdict:
    kind: VerdictKind
    query: Query
    adjustments: dict[str, frozenset[TimedVertex]] = field(default_factory=dict)
    witness: Optional[NotCoveredWitness] = None

    @property
    def identifiable(self) -> bool:
        return self.kind is not VerdictKind.NOT_COVERED

    def describe(self) -> str:
        target = (
            f"P({self.query.effect}@t | do({self.query.cause}@"
            f"{_offset(self.query.lag)}))"
        )
        if self.kind is VerdictKind.IDENTIFIABLE_TRIVIAL:
            return (
                f"{target} is identifiable: the intervention never reaches the "
                f"effect, so it equals P({self.query.effect}@t)"
            )
        if self.kind is VerdictKind.IDENTIFIABLE_BY_ADJUSTMENT:
            sets = "; ".join(
                f"{name} = {format_vertex_set(vs)}" for name, vs in self.adjustments.items()
            )
            return f"{target} is identifiable by adjustment: {sets}"
        return (
            f"{target} is not covered by the sufficient conditions "
            f"({self.witness.describe()})"
        )


def _offset(lag: int) -> str:
    return "t" if lag == 0 else f"t-{lag}"


def format_vertex_set(vs: frozenset[TimedVertex]) -> str:
    ordered = sorted(vs, key=lambda v: (-v.time, v.series))
    return "{" + ", ".join(v.label() for v in ordered) + "}"
