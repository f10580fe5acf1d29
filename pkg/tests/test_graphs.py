"""Structure invariants and derivations between the three graph views."""

import pytest

from tseffect import (
    Escg,
    Ftcg,
    GraphInvariantError,
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
from tseffect.graphs import offset_label

from conftest import scg


def test_timed_vertex_labels():
    assert TimedVertex("X", 0).label() == "X@t"
    assert TimedVertex("X", -3).label() == "X@t-3"
    assert TimedVertex("Rain", 2).label() == "Rain@t+2"
    assert offset_label(-1) == "t-1"


def test_scg_rejects_dangling_endpoint():
    with pytest.raises(GraphInvariantError):
        Scg(["X"], [("X", "Y")])


def test_scg_allows_cycles_and_self_loops():
    g = scg([("X", "Y"), ("Y", "X"), ("X", "X")])
    assert g.has_edge("X", "Y") and g.has_edge("Y", "X") and g.has_edge("X", "X")
    assert g.parents_of("X") == {"X", "Y"}
    assert g.children_of("X") == {"X", "Y"}


def test_escg_rejects_instantaneous_cycle():
    with pytest.raises(GraphInvariantError):
        Escg(["X", "Y"], lagged_edges=[], inst_edges=[("X", "Y"), ("Y", "X")])


def test_escg_rejects_instantaneous_self_loop():
    with pytest.raises(GraphInvariantError):
        Escg(["X"], lagged_edges=[], inst_edges=[("X", "X")])


def test_escg_allows_lagged_self_loop():
    e = Escg(["X"], lagged_edges=[("X", "X")], inst_edges=[])
    assert ("X", "X") in e.lagged_edges


def test_ftcg_rejects_lag_zero_self_loop():
    with pytest.raises(GraphInvariantError):
        Ftcg(["X"], {("X", "X"): {0}}, max_lag=1)


def test_ftcg_rejects_lag_zero_cycle():
    with pytest.raises(GraphInvariantError):
        Ftcg(["X", "Y"], {("X", "Y"): {0}, ("Y", "X"): {0}}, max_lag=1)


def test_ftcg_rejects_lag_beyond_max():
    with pytest.raises(GraphInvariantError):
        Ftcg(["X", "Y"], {("X", "Y"): {3}}, max_lag=2)


def test_ftcg_equality_includes_max_lag():
    a = Ftcg(["X", "Y"], {("X", "Y"): {1}}, max_lag=1)
    b = Ftcg(["X", "Y"], {("X", "Y"): {1}}, max_lag=2)
    assert a != b
    assert a == Ftcg(["X", "Y"], {("X", "Y"): {1}}, max_lag=1)


def test_derive_escg_splits_lagged_from_instantaneous(trio_ftcg_1, trio_escg_1):
    assert derive_escg(trio_ftcg_1) == trio_escg_1


def test_derive_scg_from_ftcg_and_escg(trio_ftcg_1, trio_escg_1):
    expected = scg([("X", "Y"), ("X", "X"), ("Z", "Z"), ("Z", "X"), ("X", "Z")])
    assert derive_scg(trio_ftcg_1) == expected
    assert derive_scg(trio_escg_1) == expected


def test_remove_series_drops_vertex_and_incident_edges(feedback_confounder):
    g = remove_series(feedback_confounder, "Y")
    assert g.series == frozenset({"X", "Z"})
    assert g.edges == frozenset({("X", "Z"), ("Z", "X")})


def test_ancestors_and_descendants_include_the_vertex(descendant_backdoor):
    assert ancestors(descendant_backdoor, "Y") == {"X", "Y", "Z"}
    assert descendants(descendant_backdoor, "X") == {"X", "Y", "Z"}
    assert descendants(scg([("X", "Y")]), "Y") == {"Y"}


def test_cycles_through_lists_simple_cycles(feedback_confounder):
    assert cycles_through(feedback_confounder, "X") == [("X", "Z", "X")]
    assert cycles_through(scg([("X", "Y")]), "X") == []


def test_cycles_through_includes_self_loop(mutual_pair_selfloops):
    cycles = cycles_through(mutual_pair_selfloops, "Y")
    assert ("Y", "Y") in cycles
    assert ("X", "Y", "X") in cycles or ("Y", "X", "Y") in cycles


def test_cycles_beyond_self_excludes_the_self_loop(mutual_pair_lag):
    # X sits on its self-loop and on the two-cycle with Y; only the
    # two-cycle counts as going beyond the self-loop.
    beyond = cycles_beyond_self(mutual_pair_lag, "X")
    assert all(len(set(c)) > 1 for c in beyond)
    assert any("Y" in c for c in beyond)
    g = scg([("X", "X"), ("X", "Y")])
    assert cycles_beyond_self(g, "X") == []


def test_condition_one_shape_on_feedback_confounder(feedback_confounder):
    # Removing the effect leaves the X <-> Z feedback loop through the cause.
    g = remove_series(feedback_confounder, "Y")
    assert cycles_beyond_self(g, "X") == [("X", "Z", "X")]
