"""Shared builders for the test suite.

Most tests work on a handful of small graphs that mirror the bundled
fixture files. Building them here once keeps the expectations in the
individual test modules close to the assertions.
"""

from __future__ import annotations

import pytest

from tseffect import Escg, Ftcg, Scg


def scg(edges, extra_series=()):
    """Build an Scg from an edge list, collecting series from endpoints."""
    series = {a for a, _ in edges} | {b for _, b in edges} | set(extra_series)
    return Scg(series, edges)


def pytest_configure(config):
    config._criterion_lines = {}


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = getattr(config, "_criterion_lines", {})
    if lines:
        terminalreporter.section("acceptance criteria")
        for number in sorted(lines):
            terminalreporter.write_line(lines[number])


@pytest.fixture
def criterion(request):
    """Record the one-line outcome a criterion test prints at session end."""

    def record(number: int, passed: bool, detail: str) -> None:
        word = "PASS" if passed else "FAIL"
        request.config._criterion_lines[number] = (
            f"criterion {number}: {word} - {detail}"
        )

    return record


@pytest.fixture
def chain_xy():
    return scg([("X", "Y")])


@pytest.fixture
def feedback_confounder():
    # X -> Y, X <-> Z, Z -> Y, no self-loops
    return scg([("X", "Y"), ("X", "Z"), ("Z", "X"), ("Z", "Y")])


@pytest.fixture
def descendant_backdoor():
    # X -> Y, Z -> X, Y -> Z, self-loops on X and Z
    return scg([("X", "Y"), ("Z", "X"), ("Y", "Z"), ("X", "X"), ("Z", "Z")])


@pytest.fixture
def mutual_pair_lag():
    # X <-> Y with a self-loop on X only
    return scg([("X", "Y"), ("Y", "X"), ("X", "X")])


@pytest.fixture
def mutual_pair_selfloops():
    # X <-> Y with self-loops on both
    return scg([("X", "Y"), ("Y", "X"), ("X", "X"), ("Y", "Y")])


@pytest.fixture
def trio_ftcg_1():
    return Ftcg(
        ["X", "Y", "Z"],
        {
            ("X", "Y"): {0, 1},
            ("X", "X"): {1},
            ("Z", "Z"): {1},
            ("Z", "X"): {0, 1},
            ("X", "Z"): {1},
        },
        max_lag=1,
    )


@pytest.fixture
def trio_escg_1():
    return Escg(
        ["X", "Y", "Z"],
        lagged_edges=[("X", "Y"), ("X", "X"), ("Z", "Z"), ("Z", "X"), ("X", "Z")],
        inst_edges=[("X", "Y"), ("Z", "X")],
    )
