"""JSON documents for graphs and weighted models.

Every document is an object with a ``"kind"`` discriminator:

- ``{"kind": "scg", "nodes": [...], "edges": [[a, b], ...]}`` with an
  optional ``"both": [[a, b], ...]`` shorthand that expands to the two
  directed edges,
- ``{"kind": "escg", "nodes": [...], "lagged": [[a, b], ...],
  "instantaneous": [[a, b], ...]}``,
- ``{"kind": "ftcg", "nodes": [...], "max_lag": m,
  "edges": [[a, b, lag], ...]}`` (``"gamma_max"`` is accepted as an alias
  for ``"max_lag"``),
- ``{"kind": "model", "ftcg": {...}, "coeffs": [[a, b, lag, value], ...],
  "noise_std": number-or-object}`` for a weighted simulation model.

Emission is canonical: fixed key order, sorted nodes and edges, two-space
indentation, trailing newline. Parse errors carry the JSON path of the
offending element.
"""

from __future__ import annotations

import json
import re
from typing import Union

from .errors import GraphFormatError, GraphInvariantError, ModelError
from .graphs import Escg, Ftcg, Scg, TimedVertex
from .sim import LinearDscm

AnyGraph = Union[Scg, Escg, Ftcg]

_KINDS = ("scg", "escg", "ftcg")


def _expect_object(doc, where: str) -> dict:
    if not isinstance(doc, dict):
        raise GraphFormatError(f"{where}: expected an object, got {type(doc).__name__}")
    return doc


def _take(doc: dict, where: str, allowed: dict[str, bool]) -> None:
    """Check required keys are present and no stray keys remain."""
    for key, required in allowed.items():
        if required and key not in doc:
            raise GraphFormatError(f"{where}: missing required key \"{key}\"")
    for key in doc:
        if key not in allowed:
            raise GraphFormatError(f"{where}: unexpected key \"{key}\"")


def _parse_nodes(doc: dict, where: str) -> list[str]:
    nodes = doc["nodes"]
    if not isinstance(nodes, list) or not nodes:
        raise GraphFormatError(f"{where}.nodes: expected a nonempty list")
    seen: set[str] = set()
    for i, n in enumerate(nodes):
        if not isinstance(n, str) or not n:
            raise GraphFormatError(f"{where}.nodes[{i}]: expected a nonempty string")
        if n in seen:
            raise GraphFormatError(f"{where}.nodes[{i}]: duplicate node \"{n}\"")
        seen.add(n)
    return nodes


def _parse_pairs(doc: dict, key: str, nodes: set[str], where: str) -> list[tuple[str, str]]:
    raw = doc.get(key, [])
    if not isinstance(raw, list):
        raise GraphFormatError(f"{where}.{key}: expected a list")
    out = []
    for i, item in enumerate(raw):
        spot = f"{where}.{key}[{i}]"
        if not isinstance(item, list) or len(item) != 2:
            raise GraphFormatError(f"{spot}: expected a [from, to] pair")
        a, b = item
        for end in (a, b):
            if not isinstance(end, str):
                raise GraphFormatError(f"{spot}: endpoints must be strings")
            if end not in nodes:
                raise GraphFormatError(f"{spot}: \"{end}\" is not in nodes")
        out.append((a, b))
    return out


def parse_graph(text: str) -> AnyGraph:
    """Parse a graph document, raising positioned errors on bad input."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise GraphFormatError(f"not valid JSON: {e}") from None
    doc = _expect_object(doc, "top level")
    kind = doc.get("kind")
    if kind not in _KINDS:
        raise GraphFormatError(
            f"top level: kind must be one of {', '.join(_KINDS)}, got {kind!r}"
        )
    where = kind
    if kind == "scg":
        _take(doc, where, {"kind": True, "nodes": True, "edges": True, "both": False})
        nodes = _parse_nodes(doc, where)
        node_set = set(nodes)
        edges = set(_parse_pairs(doc, "edges", node_set, where))
        for a, b in _parse_pairs(doc, "both", node_set, where):
            if a == b:
                raise GraphFormatError(f"{where}.both: ({a}, {b}) loops onto one node")
            edges.add((a, b))
            edges.add((b, a))
        return Scg(nodes, edges)
    if kind == "escg":
        _take(
            doc,
            where,
            {"kind": True, "nodes": True, "lagged": True, "instantaneous": True},
        )
        nodes = _parse_nodes(doc, where)
        node_set = set(nodes)
        lagged = _parse_pairs(doc, "lagged", node_set, where)
        inst = _parse_pairs(doc, "instantaneous", node_set, where)
        try:
            return Escg(nodes, lagged, inst)
        except GraphInvariantError as e:
            raise GraphFormatError(f"{where}.instantaneous: {e}") from None
    # ftcg
    _take(
        doc,
        where,
        {"kind": True, "nodes": True, "edges": True, "max_lag": False, "gamma_max": False},
    )
    if "max_lag" in doc and "gamma_max" in doc:
        raise GraphFormatError(f"{where}: give max_lag or gamma_max, not both")
    if "max_lag" not in doc and "gamma_max" not in doc:
        raise GraphFormatError(f"{where}: missing required key \"max_lag\"")
    max_lag = doc.get("max_lag", doc.get("gamma_max"))
    if not isinstance(max_lag, int) or isinstance(max_lag, bool) or max_lag < 1:
        raise GraphFormatError(f"{where}.max_lag: expected a positive integer")
    nodes = _parse_nodes(doc, where)
    node_set = set(nodes)
    raw = doc["edges"]
    if not isinstance(raw, list):
        raise GraphFormatError(f"{where}.edges: expected a list")
    lags: dict[tuple[str, str], set[int]] = {}
    for i, item in enumerate(raw):
        spot = f"{where}.edges[{i}]"
        if not isinstance(item, list) or len(item) != 3:
            raise GraphFormatError(f"{spot}: expected a [from, to, lag] triple")
        a, b, lag = item
        for end in (a, b):
            if not isinstance(end, str):
                raise GraphFormatError(f"{spot}: endpoints must be strings")
            if end not in node_set:
                raise GraphFormatError(f"{spot}: \"{end}\" is not in nodes")
        if not isinstance(lag, int) or isinstance(lag, bool) or lag < 0 or lag > max_lag:
            raise GraphFormatError(f"{spot}: lag must be an integer in [0, {max_lag}]")
        bucket = lags.setdefault((a, b), set())
        if lag in bucket:
            raise GraphFormatError(f"{spot}: duplicate lag {lag} for ({a}, {b})")
        bucket.add(lag)
    try:
        return Ftcg(nodes, lags, max_lag)
    except GraphInvariantError as e:
        raise GraphFormatError(f"{where}.edges: {e}") from None


def _document(g: AnyGraph) -> dict:
    if isinstance(g, Scg):
        return {
            "kind": "scg",
            "nodes": sorted(g.series),
            "edges": [list(e) for e in sorted(g.edges)],
        }
    if isinstance(g, Escg):
        return {
            "kind": "escg",
            "nodes": sorted(g.series),
            "lagged": [list(e) for e in sorted(g.lagged_edges)],
            "instantaneous": [list(e) for e in sorted(g.inst_edges)],
        }
    if isinstance(g, Ftcg):
        triples = sorted(
            (a, b, lag) for (a, b), ls in g.lags.items() for lag in ls
        )
        return {
            "kind": "ftcg",
            "nodes": sorted(g.series),
            "max_lag": g.max_lag,
            "edges": [list(t) for t in triples],
        }
    raise TypeError(f"cannot serialize {type(g).__name__}")


def emit_graph(g: AnyGraph) -> str:
    """Canonical JSON text for a graph: parse(emit(g)) == g."""
    return json.dumps(_document(g), indent=2) + "\n"


def load_graph(path: str) -> AnyGraph:
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    try:
        return parse_graph(text)
    except GraphFormatError as e:
        raise GraphFormatError(f"{path}: {e}") from None


def dump_graph(g: AnyGraph, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(emit_graph(g))


def parse_model(text: str) -> LinearDscm:
    """Parse a weighted model document."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise GraphFormatError(f"not valid JSON: {e}") from None
    doc = _expect_object(doc, "top level")
    if doc.get("kind") != "model":
        raise GraphFormatError(f"top level: kind must be \"model\", got {doc.get('kind')!r}")
    _take(doc, "model", {"kind": True, "ftcg": True, "coeffs": True, "noise_std": False})
    ftcg_doc = _expect_object(doc["ftcg"], "model.ftcg")
    if ftcg_doc.get("kind") != "ftcg":
        raise GraphFormatError("model.ftcg: kind must be \"ftcg\"")
    graph = parse_graph(json.dumps(ftcg_doc))
    raw = doc["coeffs"]
    if not isinstance(raw, list):
        raise GraphFormatError("model.coeffs: expected a list")
    coeffs: dict[tuple[str, str, int], float] = {}
    for i, item in enumerate(raw):
        spot = f"model.coeffs[{i}]"
        if not isinstance(item, list) or len(item) != 4:
            raise GraphFormatError(f"{spot}: expected a [from, to, lag, value] entry")
        a, b, lag, value = item
        if not isinstance(a, str) or not isinstance(b, str):
            raise GraphFormatError(f"{spot}: endpoints must be strings")
        if not isinstance(lag, int) or isinstance(lag, bool):
            raise GraphFormatError(f"{spot}: lag must be an integer")
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            raise GraphFormatError(f"{spot}: value must be a number")
        if (a, b, lag) in coeffs:
            raise GraphFormatError(f"{spot}: duplicate coefficient for ({a}, {b}, {lag})")
        coeffs[(a, b, lag)] = float(value)
    noise = doc.get("noise_std", 1.0)
    if isinstance(noise, dict):
        for k, v in noise.items():
            if not isinstance(v, (int, float)) or isinstance(v, bool):
                raise GraphFormatError(f"model.noise_std.{k}: expected a number")
    elif not isinstance(noise, (int, float)) or isinstance(noise, bool):
        raise GraphFormatError("model.noise_std: expected a number or an object")
    try:
        return LinearDscm(graph, coeffs, noise)
    except ModelError as e:
        raise GraphFormatError(f"model: {e}") from None


def emit_model(m: LinearDscm) -> str:
    doc = {
        "kind": "model",
        "ftcg": _document(m.ftcg),
        "coeffs": [[a, b, lag, v] for (a, b, lag), v in sorted(m.coeffs.items())],
        "noise_std": {s: m.noise_std[s] for s in sorted(m.noise_std)},
    }
    return json.dumps(doc, indent=2) + "\n"


def load_model(path: str) -> LinearDscm:
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    try:
        return parse_model(text)
    except GraphFormatError as e:
        raise GraphFormatError(f"{path}: {e}") from None


def fixture_path(name: str) -> str:
    """Absolute path of a bundled example document, by stem name."""
    from importlib.resources import files

    p = files("tseffect") / "fixtures" / f"{name}.json"
    if not p.is_file():
        raise GraphFormatError(f"no bundled fixture named {name}")
    return str(p)


def load_fixture(name: str) -> AnyGraph:
    return load_graph(fixture_path(name))


_VERTEX_RE = re.compile(r"^(?P<series>.+)@t(?P<offset>[+-]\d+)?$")


def parse_vertex_label(s: str) -> TimedVertex:
    """Inverse of ``TimedVertex.label()``: ``"Z@t-1"`` -> (Z, -1)."""
    m = _VERTEX_RE.match(s)
    if not m:
        raise GraphFormatError(
            f"\"{s}\" is not a timed vertex; expected series@t, series@t-2, ..."
        )
    offset = m.group("offset")
    return TimedVertex(m.group("series"), int(offset) if offset else 0)
