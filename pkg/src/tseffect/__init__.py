"""Identifiability of lagged total effects from summary views of a
stationary time-series causal structure, with a brute-force oracle and a
linear-Gaussian simulator to hold every verdict to account."""

from .errors import (
    GraphFormatError,
    GraphInvariantError,
    ModelError,
    QueryError,
    ResourceCapError,
    TseffectError,
)
from .escg import densest_candidate, identify_escg, parent_adjustment
from .graphs import (
    Escg,
    Ftcg,
    Scg,
    TimedVertex,
    ancestors,
    cycles_beyond_self,
    cycles_through,
    derive_escg,
    derive_scg,
    descendants,
    remove_series,
)
from .oracle import (
    Caps,
    CompatibilityResult,
    EarlyBlockingResult,
    OracleResult,
    backdoor_over_all,
    candidate_at,
    check_ambiguous_compatibility,
    check_early_blocking,
    classify_ambiguous,
    count_candidates,
    enumerate_candidates,
    is_ambiguous_path,
    is_compatible,
    search_common_adjustment,
)
from .paths import Mark, MarkedPath, marked_path
from .query import Query, Verdict, VerdictKind, WitnessReason
from .scg import (
    ancestral_history_adjustment,
    history_adjustment,
    identify_scg,
    identify_scg_disjunctive,
)
from .sim import (
    LinearDscm,
    OlsEffect,
    estimate_adjusted,
    interventional_effect,
    random_linear_dscm,
    simulate,
    true_total_effect,
    write_csv,
)
from .unrolled import Window, check_standard_backdoor, default_window, unroll

__version__ = "0.1.0"

__all__ = [
    "Caps",
    "CompatibilityResult",
    "EarlyBlockingResult",
    "Escg",
    "Ftcg",
    "GraphFormatError",
    "GraphInvariantError",
    "LinearDscm",
    "Mark",
    "MarkedPath",
    "ModelError",
    "OlsEffect",
    "OracleResult",
    "Query",
    "QueryError",
    "ResourceCapError",
    "Scg",
    "TimedVertex",
    "TseffectError",
    "Verdict",
    "VerdictKind",
    "Window",
    "WitnessReason",
    "ancestors",
    "ancestral_history_adjustment",
    "backdoor_over_all",
    "candidate_at",
    "check_ambiguous_compatibility",
    "check_early_blocking",
    "check_standard_backdoor",
    "classify_ambiguous",
    "count_candidates",
    "cycles_beyond_self",
    "cycles_through",
    "default_window",
    "densest_candidate",
    "derive_escg",
    "derive_scg",
    "descendants",
    "enumerate_candidates",
    "estimate_adjusted",
    "history_adjustment",
    "identify_escg",
    "identify_scg",
    "identify_scg_disjunctive",
    "interventional_effect",
    "is_ambiguous_path",
    "is_compatible",
    "marked_path",
    "parent_adjustment",
    "random_linear_dscm",
    "remove_series",
    "search_common_adjustment",
    "simulate",
    "true_total_effect",
    "unroll",
    "write_csv",
]
