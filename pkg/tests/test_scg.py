"""Verdicts from summary graphs: fixtures, witnesses, and adjustment sets."""

import itertools

import pytest

from tseffect import (
    Query,
    QueryError,
    TimedVertex,
    VerdictKind,
    WitnessReason,
    ancestral_history_adjustment,
    history_adjustment,
    identify_scg,
    identify_scg_disjunctive,
)
from tseffect.graphio import load_fixture

from conftest import scg


def tv(series, time):
    return TimedVertex(series, time)


def kind_of(g, x, y, gamma, max_lag=1):
    return identify_scg(g, Query(x, y, gamma, max_lag))


def test_trivial_when_cause_misses_effect():
    v = kind_of(scg([("Y", "X")]), "X", "Y", 1)
    assert v.kind is VerdictKind.IDENTIFIABLE_TRIVIAL
    assert v.identifiable and v.adjustments == {} and v.witness is None


def test_query_validation():
    g = scg([("X", "Y")])
    with pytest.raises(QueryError):
        Query("X", "X", 1, 1)
    with pytest.raises(QueryError):
        Query("X", "Y", -1, 1)
    with pytest.raises(QueryError):
        Query("X", "Y", 1, 0)
    with pytest.raises(QueryError):
        identify_scg(g, Query("X", "W", 1, 1))


def test_history_adjustment_offsets(mutual_pair_lag):
    # Both series can descend from X, so both enter strictly before the
    # intervention only.
    got = history_adjustment(mutual_pair_lag, Query("X", "Y", 1, 1))
    assert got == frozenset({tv("X", -2), tv("Y", -2)})
    # With more history the band widens.
    got = history_adjustment(mutual_pair_lag, Query("X", "Y", 1, 2))
    assert got == frozenset({tv("X", -2), tv("X", -3), tv("Y", -2), tv("Y", -3)})


def test_history_adjustment_keeps_nondescendants_at_the_intervention_time():
    g = load_fixture("mutual_pair_guarded")
    got = history_adjustment(g, Query("X", "Y", 1, 1))
    assert got == frozenset(
        {
            tv("X", -2),
            tv("Y", -2),
            tv("W", -2),
            tv("Z", -2),
            tv("W", -1),
            tv("Z", -1),
        }
    )
    # Every series here is an ancestor of X or Y, so the pruned set matches.
    assert ancestral_history_adjustment(g, Query("X", "Y", 1, 1)) == got


def test_ancestral_history_adjustment_prunes_bystanders():
    # W is disconnected from the X -> Y mechanism apart from X -> W.
    g = scg([("X", "Y"), ("X", "W")])
    q = Query("X", "Y", 1, 1)
    full = history_adjustment(g, q)
    pruned = ancestral_history_adjustment(g, q)
    assert tv("W", -2) in full
    assert pruned == frozenset({tv("X", -2), tv("Y", -2)})


def test_feedback_confounder_verdicts(feedback_confounder):
    # The X <-> Z loop survives removing Y, so any strictly lagged query
    # falls outside the covered cases.
    v = kind_of(feedback_confounder, "X", "Y", 1)
    assert v.kind is VerdictKind.NOT_COVERED
    assert v.witness.reason is WitnessReason.CYCLE_THROUGH_CAUSE
    assert v.witness.cycle == ("X", "Z", "X")
    assert not v.identifiable and v.adjustments == {}
    assert "cycle" in v.describe()


def test_descendant_backdoor_verdicts(descendant_backdoor):
    # X <- Z <- Y is a three-vertex backdoor path through descendants.
    v = kind_of(descendant_backdoor, "X", "Y", 1)
    assert v.kind is VerdictKind.NOT_COVERED
    assert v.witness.reason is WitnessReason.ACTIVE_BACKDOOR_LONG
    assert v.witness.path.vertices == ("X", "Z", "Y")


def test_mutual_pair_wrong_lag(mutual_pair_lag):
    v = kind_of(mutual_pair_lag, "X", "Y", 2)
    assert v.kind is VerdictKind.NOT_COVERED
    assert v.witness.reason is WitnessReason.ACTIVE_BACKDOOR_WRONG_LAG
    assert v.witness.path.vertices == ("X", "Y")
    assert kind_of(mutual_pair_lag, "X", "Y", 1).identifiable


def test_mutual_pair_selfloop_cycle(mutual_pair_selfloops):
    v = kind_of(mutual_pair_selfloops, "X", "Y", 1)
    assert v.kind is VerdictKind.NOT_COVERED
    assert v.witness.reason is WitnessReason.ACTIVE_BACKDOOR_CYCLE
    assert v.witness.cycle == ("Y", "Y")
    # Dropping the effect's self-loop removes the obstruction.
    relaxed = scg([("X", "Y"), ("Y", "X"), ("X", "X")])
    assert kind_of(relaxed, "X", "Y", 1).identifiable


def test_gamma_zero_feedback_fixture():
    g = load_fixture("gamma_zero_feedback")
    assert kind_of(g, "X", "Y", 0).kind is VerdictKind.IDENTIFIABLE_BY_ADJUSTMENT
    v = kind_of(g, "X", "Y", 1)
    assert v.kind is VerdictKind.NOT_COVERED
    assert v.witness.reason is WitnessReason.CYCLE_THROUGH_CAUSE


def test_upstream_confounders_fixture():
    g = load_fixture("upstream_confounders")
    for gamma in (0, 1, 2, 3):
        v = kind_of(g, "X", "Y", gamma)
        assert v.kind is VerdictKind.IDENTIFIABLE_BY_ADJUSTMENT, gamma
        assert set(v.adjustments) == {
            "history_adjustment",
            "ancestral_history_adjustment",
        }


def test_mutual_pair_guarded_fixture():
    g = load_fixture("mutual_pair_guarded")
    assert kind_of(g, "X", "Y", 1).identifiable
    v = kind_of(g, "X", "Y", 2)
    assert v.kind is VerdictKind.NOT_COVERED
    assert v.witness.reason is WitnessReason.ACTIVE_BACKDOOR_WRONG_LAG


def test_nephrology_fixture():
    g = load_fixture("nephrology")
    assert kind_of(g, "Creatinine", "Hypertension", 1).identifiable
    assert kind_of(g, "Hypertension", "Creatinine", 1).identifiable


def test_finance_fixture():
    g = load_fixture("finance")
    assert kind_of(g, "MeanTransactionFees", "UniqueActiveWallets", 1).identifiable
    v = kind_of(g, "UniqueActiveWallets", "MeanTransactionFees", 1)
    assert v.kind is VerdictKind.NOT_COVERED
    assert v.witness.reason is WitnessReason.ACTIVE_BACKDOOR_CYCLE
    assert v.witness.cycle == ("MeanTransactionFees", "MeanTransactionFees")


def test_system_monitoring_fixture():
    g = load_fixture("system_monitoring")
    for gamma in (0, 1, 2):
        assert kind_of(g, "NetworkInput", "CpuGlobal", gamma, 2).identifiable
    for x, y in itertools.permutations(sorted(g.series), 2):
        assert kind_of(g, x, y, 1).identifiable, (x, y)


def test_thermoregulation_fixture():
    g = load_fixture("thermoregulation")
    for gamma in (0, 1, 2):
        assert kind_of(g, "LivingRoom", "Office", gamma).identifiable, gamma


def test_verdict_descriptions_render():
    g = load_fixture("feedback_confounder")
    v = kind_of(g, "X", "Y", 1)
    text = v.describe()
    assert "not covered" in text and "X" in text
    ok = kind_of(load_fixture("upstream_confounders"), "X", "Y", 1)
    assert "identifiable" in ok.describe()
    assert "X@t-1" in ok.describe() or "do(X@t-1)" in ok.describe()


def test_deciders_agree_on_two_series_exhaustively():
    names = ["X", "Y"]
    pool = [(a, b) for a in names for b in names]
    for bits in itertools.product((0, 1), repeat=len(pool)):
        g = scg([e for e, keep in zip(pool, bits) if keep], extra_series=names)
        for x, y in itertools.permutations(names, 2):
            for gamma in (0, 1, 2):
                for max_lag in (1, 2):
                    q = Query(x, y, gamma, max_lag)
                    assert (
                        identify_scg(g, q).kind
                        == identify_scg_disjunctive(g, q).kind
                    ), (bits, x, y, gamma, max_lag)
