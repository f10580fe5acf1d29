"""Marked paths, blocking rules, and d-separation.

``d_separated`` is cross-checked against an independent oracle: the
classic moralization construction (ancestral subgraph, marry co-parents,
drop directions, remove the conditioning set, test connectivity). The two
implementations share no code, so agreement over random DAGs is evidence
rather than tautology.
"""

from collections import deque

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tseffect import (
    Ftcg,
    GraphInvariantError,
    MarkedPath,
    Mark,
    Query,
    ResourceCapError,
    Scg,
    TimedVertex,
    Window,
    ancestors,
    check_standard_backdoor,
    default_window,
    marked_path,
    unroll,
)
from tseffect.paths import (
    d_separated,
    enumerate_simple_paths,
    is_backdoor,
    is_blocked_dag,
    is_sigma_active_empty,
    mark_between,
)
from tseffect.unrolled import find_active_backdoor_path, has_active_backdoor_walk

from conftest import scg


def test_mark_between_reads_direction():
    g = scg([("X", "Y"), ("Y", "Z"), ("Z", "Y")])
    assert mark_between(g, "X", "Y") is Mark.FORWARD
    assert mark_between(g, "Y", "X") is Mark.BACKWARD
    assert mark_between(g, "Y", "Z") is Mark.BOTH
    with pytest.raises(GraphInvariantError):
        mark_between(g, "X", "Z")


def test_marked_path_rejects_repeats_and_bad_arity():
    with pytest.raises(GraphInvariantError):
        MarkedPath(["X", "Y", "X"], [Mark.FORWARD, Mark.BACKWARD])
    with pytest.raises(GraphInvariantError):
        MarkedPath(["X", "Y"], [])
    with pytest.raises(GraphInvariantError):
        MarkedPath(["X"], [])


def test_path_rendering_uses_marks():
    g = scg([("X", "Y"), ("Z", "Y"), ("Z", "X"), ("X", "Z")])
    p = marked_path(g, ["Y", "Z", "X"])
    assert str(p) == "Y <- Z <-> X"
    assert p.interior == ("Z",)


def test_enumerate_simple_paths_on_complete_trio():
    # Complete digraph on three series: the X..Y paths are the direct link
    # and the one detour through Z.
    series = ["X", "Y", "Z"]
    g = Scg(series, [(a, b) for a in series for b in series if a != b])
    paths = enumerate_simple_paths(g, "X", "Y")
    assert [p.vertices for p in paths] == [("X", "Y"), ("X", "Z", "Y")]


def test_enumerate_simple_paths_cap():
    series = [f"V{i}" for i in range(6)]
    g = Scg(series, [(a, b) for a in series for b in series if a != b])
    with pytest.raises(ResourceCapError):
        enumerate_simple_paths(g, "V0", "V1", cap=3)


def test_is_backdoor_looks_at_first_mark():
    g = scg([("X", "Y"), ("Z", "X"), ("Z", "Y"), ("Y", "W"), ("W", "Y")])
    assert not is_backdoor(marked_path(g, ["X", "Y"]))
    assert is_backdoor(marked_path(g, ["X", "Z", "Y"]))
    # A two-headed first step counts: some orientation points into X.
    gm = scg([("X", "Y"), ("Y", "X")])
    assert is_backdoor(marked_path(gm, ["X", "Y"]))


def test_sigma_activity_blocks_only_strict_colliders():
    g = scg([("X", "Z"), ("Y", "Z")])
    assert not is_sigma_active_empty(marked_path(g, ["X", "Z", "Y"]))
    # Replace one side with a mutual link and the collider is no longer
    # strict: some candidate orients Z as a non-collider.
    gm = scg([("X", "Z"), ("Y", "Z"), ("Z", "Y")])
    assert is_sigma_active_empty(marked_path(gm, ["X", "Z", "Y"]))
    g2 = scg([("X", "Z"), ("Z", "Y")])
    assert is_sigma_active_empty(marked_path(g2, ["X", "Z", "Y"]))


def test_dag_blocking_collider_and_noncollider():
    g = scg([("X", "Z"), ("Y", "Z"), ("Z", "W")])
    collider = marked_path(g, ["X", "Z", "Y"])
    assert is_blocked_dag(collider, frozenset(), g)
    assert not is_blocked_dag(collider, frozenset({"Z"}), g)
    # Conditioning on a descendant of the collider opens it too.
    assert not is_blocked_dag(collider, frozenset({"W"}), g)
    chain = marked_path(g, ["X", "Z", "W"])
    assert not is_blocked_dag(chain, frozenset(), g)
    assert is_blocked_dag(chain, frozenset({"Z"}), g)


def test_dag_blocking_rejects_mutual_marks():
    gm = scg([("X", "Y"), ("Y", "X"), ("Y", "Z")])
    p = marked_path(gm, ["X", "Y", "Z"])
    with pytest.raises(GraphInvariantError):
        is_blocked_dag(p, frozenset(), gm)


# -- d-separation vs. moralization ------------------------------------------

LETTERS = "ABCDEF"


def _moral_separated(g: Scg, a, b, z: frozenset) -> bool:
    """Independent oracle: separation in the moralized ancestral graph."""
    keep = set(z) | {a, b}
    anc = set()
    for v in keep:
        anc |= ancestors(g, v)
    undirected: dict[str, set[str]] = {v: set() for v in anc}
    for u, v in g.edges:
        if u in anc and v in anc:
            undirected[u].add(v)
            undirected[v].add(u)
    for v in anc:
        parents = [p for p in g.parents_of(v) if p in anc]
        for i, p in enumerate(parents):
            for q in parents[i + 1 :]:
                undirected[p].add(q)
                undirected[q].add(p)
    frontier = deque([a])
    seen = {a}
    while frontier:
        u = frontier.popleft()
        if u == b:
            return False
        for w in undirected[u]:
            if w not in seen and w not in z:
                seen.add(w)
                frontier.append(w)
    return True


@st.composite
def dag_and_query(draw):
    n = draw(st.integers(min_value=3, max_value=6))
    names = list(LETTERS[:n])
    pool = [(names[i], names[j]) for i in range(n) for j in range(i + 1, n)]
    edges = [e for e in pool if draw(st.booleans())]
    g = Scg(names, edges)
    a, b = draw(st.permutations(names).map(lambda p: (p[0], p[1])))
    rest = [v for v in names if v not in (a, b)]
    z = frozenset(v for v in rest if draw(st.booleans()))
    return g, a, b, z


@given(dag_and_query())
@settings(max_examples=300, deadline=None)
def test_d_separation_agrees_with_moralization(case):
    g, a, b, z = case
    assert d_separated(g, a, b, z) == _moral_separated(g, a, b, z)


# -- unrolled candidate graphs ----------------------------------------------


def test_window_validation_and_default():
    assert list(Window(-2).times) == [-2, -1, 0]
    assert str(Window(-3, 0)) == "[t-3, t]"
    with pytest.raises(GraphInvariantError):
        Window(1, 0)
    assert default_window(Query("X", "Y", 1, 2)) == Window(-5, 0)


def test_unroll_repeats_the_lag_pattern(trio_ftcg_1):
    tg = unroll(trio_ftcg_1, Window(-2))
    assert len(tg) == 9
    x0, x1 = TimedVertex("X", 0), TimedVertex("X", -1)
    y0, z0 = TimedVertex("Y", 0), TimedVertex("Z", 0)
    assert tg.has_edge(x0, y0)  # instantaneous
    assert tg.has_edge(x1, y0)  # lag 1
    assert tg.has_edge(x1, x0)
    assert tg.has_edge(z0, x0)
    assert not tg.has_edge(x0, z0)  # X -> Z only at lag 1
    assert not tg.has_edge(y0, x0)
    # Edges never cross the truncation boundary.
    assert TimedVertex("X", -3) not in tg


def test_active_walk_and_path_certificates_agree(trio_ftcg_1):
    tg = unroll(trio_ftcg_1, Window(-3))
    x = TimedVertex("X", -1)
    y = TimedVertex("Y", 0)
    for z in (
        frozenset(),
        frozenset({TimedVertex("Z", -1)}),
        frozenset({TimedVertex("X", -2), TimedVertex("Z", -2)}),
        frozenset({TimedVertex("Z", 0)}),
    ):
        walk = has_active_backdoor_walk(tg, x, y, z)
        path = find_active_backdoor_path(tg, x, y, z)
        assert walk == (path is not None)
        if path is not None:
            assert path.vertices[0] == x and path.vertices[-1] == y
            assert path.marks[0] is Mark.BACKWARD


def test_standard_backdoor_check_on_a_two_series_candidate():
    # Z@t-1 confounds X@t-1 -> Y@t through Z's instantaneous edges.
    f = Ftcg(
        ["X", "Y", "Z"],
        {("X", "Y"): {1}, ("Z", "X"): {0}, ("Z", "Y"): {0, 1}},
        max_lag=1,
    )
    q = Query("X", "Y", 1, 1)
    violation = check_standard_backdoor(f, q, frozenset())
    assert violation is not None and violation.path is not None
    assert violation.vertex is None
    ok = check_standard_backdoor(f, q, frozenset({TimedVertex("Z", -1)}))
    assert ok is None


def test_standard_backdoor_check_flags_descendants():
    f = Ftcg(["X", "Y"], {("X", "Y"): {0, 1}}, max_lag=1)
    q = Query("X", "Y", 1, 1)
    violation = check_standard_backdoor(f, q, frozenset({TimedVertex("Y", -1)}))
    assert violation is not None
    assert violation.vertex == TimedVertex("Y", -1)
    assert "descend" in violation.describe()


def test_standard_backdoor_rejects_set_outside_window():
    f = Ftcg(["X", "Y"], {("X", "Y"): {1}}, max_lag=1)
    q = Query("X", "Y", 1, 1)
    from tseffect import QueryError

    with pytest.raises(QueryError):
        check_standard_backdoor(f, q, frozenset({TimedVertex("X", -9)}), Window(-3))
