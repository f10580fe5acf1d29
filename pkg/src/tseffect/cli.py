"""Command-line surface.

Four subcommands: ``identify`` decides a query from a summary document,
``oracle`` verifies the closed-form adjustment sets against every
candidate graph (or searches for a common set), ``simulate`` runs a
seeded linear-Gaussian end-to-end check, and ``convert`` derives coarser
documents from finer ones.

Exit codes are part of the interface: 0 identifiable / oracle pass /
search hit, 2 not covered / counterexample found / search exhausted,
3 resource cap, 1 bad input. JSON reports are deterministic: keys are
sorted, the package version is embedded, and no timestamps appear, so
identical inputs and seeds give byte-identical output.
"""

from __future__ import annotations

import json
import os
import sys
from typing import Optional

import click
import numpy as np

from . import __version__
from .errors import ModelError, QueryError, ResourceCapError, TseffectError
from .escg import identify_escg
from .graphio import (
    load_graph,
    load_model,
    emit_graph,
    parse_vertex_label,
)
from .graphs import Escg, Ftcg, Scg, derive_escg, derive_scg
from .oracle import Caps, backdoor_over_all, candidate_at, count_candidates, search_common_adjustment
from .query import Query, Verdict, VerdictKind, format_vertex_set
from .scg import identify_scg
from .sim import (
    LinearDscm,
    estimate_adjusted,
    interventional_effect,
    random_linear_dscm,
    simulate,
    true_total_effect,
    write_csv,
)
from .unrolled import Window, default_window


def _emit(report: dict, fmt: str, text_lines: list[str]) -> None:
    if fmt == "json":
        click.echo(json.dumps(report, sort_keys=True, indent=2))
    else:
        for line in text_lines:
            click.echo(line)


def _vertex_labels(vs) -> list[str]:
    return [v.label() for v in sorted(vs, key=lambda v: (v.time, v.series))]


def _witness_doc(verdict: Verdict) -> Optional[dict]:
    w = verdict.witness
    if w is None:
        return None
    return {
        "reason": w.reason.value,
        "cycle": list(w.cycle) if w.cycle else None,
        "path": str(w.path) if w.path else None,
    }


def _load_abstraction(path: str):
    g = load_graph(path)
    if isinstance(g, Ftcg):
        raise QueryError(
            "this command reads summary documents (scg or escg); "
            "use convert to derive one from the ftcg"
        )
    return g


def _decide(g, q: Query) -> Verdict:
    if isinstance(g, Scg):
        return identify_scg(g, q)
    return identify_escg(g, q)


@click.group()
@click.version_option(version=__version__, prog_name="tseffect")
def cli() -> None:
    """Decide identifiability of lagged total effects from summary graphs."""


@cli.command()
@click.argument("graph_file", type=click.Path())
@click.option("--x", "cause", required=True, help="Series intervened on.")
@click.option("--y", "effect", required=True, help="Series read out at time t.")
@click.option("--gamma", type=int, required=True, help="Intervention lag (>= 0).")
@click.option("--gamma-max", type=int, default=1, show_default=True, help="Bound on edge lags.")
@click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="text")
def identify(graph_file: str, cause: str, effect: str, gamma: int, gamma_max: int, fmt: str) -> None:
    """Decide a query from an SCG or ESCG document."""
    g = _load_abstraction(graph_file)
    q = Query(cause, effect, gamma, gamma_max)
    verdict = _decide(g, q)
    report = {
        "version": __version__,
        "command": "identify",
        "graph_kind": "scg" if isinstance(g, Scg) else "escg",
        "query": {"cause": cause, "effect": effect, "gamma": gamma, "gamma_max": gamma_max},
        "verdict": verdict.kind.value,
        "adjustments": {
            name: _vertex_labels(vs) for name, vs in sorted(verdict.adjustments.items())
        },
        "witness": _witness_doc(verdict),
    }
    _emit(report, fmt, [verdict.describe()])
    sys.exit(0 if verdict.identifiable else 2)


@cli.command()
@click.argument("graph_file", type=click.Path())
@click.option("--x", "cause", required=True)
@click.option("--y", "effect", required=True)
@click.option("--gamma", type=int, required=True)
@click.option("--gamma-max", type=int, default=1, show_default=True)
@click.option("--window", "t_min", type=int, default=None,
              help="Earliest offset to unroll (default -(gamma + 2*gamma_max)).")
@click.option("--search-set", is_flag=True,
              help="Search the window for a set valid in every candidate instead "
                   "of verifying the closed-form sets.")
@click.option("--caps", type=int, default=None,
              help="Bound on candidates enumerated and subsets searched.")
@click.option("--engine", type=click.Choice(["auto", "python", "bitset"]), default="auto")
@click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="text")
def oracle(graph_file: str, cause: str, effect: str, gamma: int, gamma_max: int,
           t_min: Optional[int], search_set: bool, caps: Optional[int],
           engine: str, fmt: str) -> None:
    """Verify adjustment sets against every candidate full time graph."""
    g = _load_abstraction(graph_file)
    q = Query(cause, effect, gamma, gamma_max)
    window = Window(t_min) if t_min is not None else default_window(q)
    cap_obj = Caps(max_candidates=caps, max_subsets=caps) if caps else Caps()
    n_candidates = count_candidates(g, q.max_lag, cap_obj)
    report: dict = {
        "version": __version__,
        "command": "oracle",
        "graph_kind": "scg" if isinstance(g, Scg) else "escg",
        "query": {"cause": cause, "effect": effect, "gamma": gamma, "gamma_max": gamma_max},
        "window": str(window),
        "candidates": n_candidates,
    }

    if search_set:
        found = search_common_adjustment(g, q, window, cap_obj, engine)
        report["search"] = {"found": found is not None,
                           "set": _vertex_labels(found) if found is not None else None}
        if found is not None:
            _emit(report, fmt, [f"common adjustment set over {n_candidates} candidates: "
                                f"{format_vertex_set(found)}"])
            sys.exit(0)
        _emit(report, fmt, [f"no common adjustment set in window {window} "
                            f"({n_candidates} candidates)"])
        sys.exit(2)

    verdict = _decide(g, q)
    report["verdict"] = verdict.kind.value
    if verdict.kind is VerdictKind.IDENTIFIABLE_TRIVIAL:
        report["sets"] = {}
        _emit(report, fmt, [verdict.describe(), "nothing to verify: the cause never "
                            "reaches the effect"])
        sys.exit(0)
    if not verdict.identifiable:
        report["sets"] = {}
        report["witness"] = _witness_doc(verdict)
        _emit(report, fmt, [verdict.describe(),
                            "no closed-form set to verify; try --search-set"])
        sys.exit(2)

    sets_doc = {}
    lines = [f"window {window}, {n_candidates} candidate graphs"]
    all_passed = True
    for name, vs in sorted(verdict.adjustments.items()):
        result = backdoor_over_all(g, q, vs, window, cap_obj, engine)
        entry = {
            "set": _vertex_labels(vs),
            "passed": result.passed,
            "counterexample": None,
        }
        if result.passed:
            lines.append(f"{name}: valid in all {result.candidates} candidates")
        else:
            all_passed = False
            ce = result.counterexample
            entry["counterexample"] = {
                "candidate_index": ce.index,
                "candidate": sorted(
                    (a, b, lag) for (a, b), ls in ce.candidate.lags.items() for lag in ls
                ),
                "violation": ce.violation.describe(),
            }
            lines.append(f"{name}: FAILS on candidate #{ce.index}: {ce.violation.describe()}")
        sets_doc[name] = entry
    report["sets"] = sets_doc
    _emit(report, fmt, lines)
    sys.exit(0 if all_passed else 2)


def _spawn_seeds(seed: int, n: int) -> list[int]:
    rng = np.random.default_rng(seed)
    return [int(s) for s in rng.integers(0, 2**63 - 1, size=n)]


@cli.command("simulate")
@click.argument("graph_file", type=click.Path())
@click.option("--x", "cause", required=True)
@click.option("--y", "effect", required=True)
@click.option("--gamma", type=int, required=True)
@click.option("--gamma-max", type=int, default=1, show_default=True)
@click.option("--samples", type=int, default=200_000, show_default=True,
              help="Reference-time samples for estimation.")
@click.option("--seed", type=int, default=0, show_default=True,
              help="Base seed (the ID_SEED environment variable overrides it).")
@click.option("--candidate", "candidate_index", type=int, default=None,
              help="Candidate graph index to simulate from (default: seeded draw).")
@click.option("--adjust", "adjust_labels", multiple=True,
              help="Adjust for these timed vertices (e.g. Z@t-1) instead of the "
                   "closed-form sets. Repeatable; pass once with empty value for "
                   "the empty set.")
@click.option("--csv-out", type=click.Path(), default=None,
              help="Write the observational draw as CSV (one column per series).")
@click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="text")
def simulate_cmd(graph_file: str, cause: str, effect: str, gamma: int, gamma_max: int,
                 samples: int, seed: int, candidate_index: Optional[int],
                 adjust_labels: tuple[str, ...], csv_out: Optional[str], fmt: str) -> None:
    """Check a verdict numerically on a seeded linear-Gaussian model."""
    if samples < 1:
        raise ModelError(f"need at least one sample, got {samples}")
    env_seed = os.environ.get("ID_SEED")
    if env_seed is not None:
        try:
            seed = int(env_seed)
        except ValueError:
            raise ModelError(f"ID_SEED must be an integer, got {env_seed!r}") from None

    with open(graph_file, encoding="utf-8") as fh:
        text = fh.read()
    try:
        kind = json.loads(text).get("kind")
    except (json.JSONDecodeError, AttributeError):
        kind = None
    model: Optional[LinearDscm] = load_model(graph_file) if kind == "model" else None
    graph = model.ftcg if model is not None else load_graph(graph_file)

    q = Query(cause, effect, gamma, gamma_max)
    pick_seed, coeff_seed, sim_seed, dose_seed = _spawn_seeds(seed, 4)

    chosen_index: Optional[int] = None
    if model is not None or isinstance(graph, Ftcg):
        if graph.max_lag != gamma_max:
            raise QueryError(
                f"--gamma-max {gamma_max} disagrees with the document's max_lag {graph.max_lag}"
            )
        dscm = model if model is not None else random_linear_dscm(graph, coeff_seed)
    else:
        verdict = _decide(graph, q)
        if not verdict.identifiable and not adjust_labels:
            click.echo(verdict.describe())
            click.echo("not covered: pass --adjust to demonstrate a chosen set anyway")
            sys.exit(2)
        total = count_candidates(graph, q.max_lag)
        if candidate_index is None:
            chosen_index = int(np.random.default_rng(pick_seed).integers(total))
        elif 0 <= candidate_index < total:
            chosen_index = candidate_index
        else:
            raise QueryError(f"candidate index {candidate_index} not in [0, {total})")
        dscm = random_linear_dscm(candidate_at(graph, q.max_lag, chosen_index), coeff_seed)

    if adjust_labels:
        labels = [l for l in adjust_labels if l]
        sets = {"requested": frozenset(parse_vertex_label(l) for l in labels)}
    elif isinstance(graph, (Ftcg,)) or model is not None:
        verdict = identify_escg(derive_escg(dscm.ftcg), q)
        sets = dict(verdict.adjustments)
    else:
        sets = dict(verdict.adjustments)

    truth = true_total_effect(dscm, q)
    lead = q.lag + q.max_lag
    data = simulate(dscm, samples + lead, sim_seed, burn_in=10 * (q.lag + q.max_lag + 1))
    if csv_out:
        with open(csv_out, "w", encoding="utf-8") as fh:
            write_csv(data, fh)

    estimates = {}
    lines = [f"true total effect: {truth:+.6f}"]
    if chosen_index is not None:
        lines.insert(0, f"simulating candidate #{chosen_index}")
    for name, vs in sorted(sets.items()):
        est = estimate_adjusted(data, q, vs)
        gap = abs(est.estimate - truth)
        flagged = gap > 5 * est.stderr
        estimates[name] = {
            "set": _vertex_labels(vs),
            "estimate": est.estimate,
            "stderr": est.stderr,
            "n": est.n,
            "gap": gap,
            "biased": flagged,
        }
        note = "  ** gap exceeds 5 standard errors **" if flagged else ""
        lines.append(
            f"adjusted ({name}): {est.estimate:+.6f} (se {est.stderr:.6f}), "
            f"gap {gap:.6f}{note}"
        )
    iv = interventional_effect(dscm, q, episodes=samples, seed=dose_seed)
    iv_gap = abs(iv.estimate - truth)
    lines.append(
        f"interventional: {iv.estimate:+.6f} (se {iv.stderr:.6f}), gap {iv_gap:.6f}"
    )
    report = {
        "version": __version__,
        "command": "simulate",
        "query": {"cause": cause, "effect": effect, "gamma": gamma, "gamma_max": gamma_max},
        "seed": seed,
        "samples": samples,
        "candidate_index": chosen_index,
        "true_effect": truth,
        "adjusted": estimates,
        "interventional": {"estimate": iv.estimate, "stderr": iv.stderr, "gap": iv_gap},
    }
    _emit(report, fmt, lines)
    sys.exit(0)


@cli.command()
@click.argument("graph_file", type=click.Path())
@click.option("--to", "target", type=click.Choice(["escg", "scg"]), required=True)
@click.option("-o", "--out", type=click.Path(), default=None,
              help="Write here instead of stdout.")
def convert(graph_file: str, target: str, out: Optional[str]) -> None:
    """Derive a coarser document: ftcg -> escg -> scg."""
    g = load_graph(graph_file)
    if target == "escg":
        if not isinstance(g, Ftcg):
            raise QueryError("only an ftcg document can be converted to an escg")
        derived = derive_escg(g)
    else:
        if isinstance(g, Scg):
            raise QueryError("the document is already an scg")
        derived = derive_scg(g)
    text = emit_graph(derived)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        click.echo(text, nl=False)
    sys.exit(0)


def main(argv: Optional[list[str]] = None) -> None:
    """Entry point mapping every failure onto the documented exit codes."""
    try:
        cli.main(args=argv, standalone_mode=False)
    except SystemExit:
        raise
    except click.ClickException as e:
        e.show()
        sys.exit(1)
    except click.Abort:
        sys.exit(1)
    except ResourceCapError as e:
        click.echo(f"error: {e}", err=True)
        sys.exit(3)
    except (TseffectError, OSError) as e:
        click.echo(f"error: {e}", err=True)
        sys.exit(1)


if __name__ == "__main__":
    main()
