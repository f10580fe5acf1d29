"""Linear-Gaussian instantiation of a full time graph.

Every edge ``a_{s-lag} -> b_s`` carries one real coefficient; every series
adds independent Gaussian noise. That keeps the adjustment formula exact:
the total effect of ``x@t-lag`` on ``y@t`` is a regression coefficient, and
the sum over directed paths of coefficient products gives the same number
in closed form. The two routes are kept separate on purpose so they can
check each other:

- ``true_total_effect`` walks the unrolled graph (no sampling),
- ``estimate_adjusted`` regresses simulated observational data on the
  cause plus an adjustment set,
- ``interventional_effect`` simulates many independent episodes, forces
  the cause to a random dose in each, and regresses the outcome on the
  dose.

Stability is enforced at construction: for every series, the absolute
incoming coefficients must sum to at most 0.9, which keeps the process
stationary without any spectral analysis.
"""

from __future__ import annotations

import csv
from typing import IO, Iterable, Mapping, NamedTuple, Optional, Union

import numpy as np
from numba import njit

from .errors import ModelError, QueryError
from .graphs import Ftcg, SeriesId, TimedVertex
from .query import Query
from .unrolled import Window

STABILITY_BOUND = 0.9

Coeffs = Mapping[tuple[SeriesId, SeriesId, int], float]


class OlsEffect(NamedTuple):
    """A least-squares slope with its standard error and sample count."""

    estimate: float
    stderr: float
    n: int

    def __float__(self) -> float:
        return self.estimate


def _inst_order(f: Ftcg) -> list[SeriesId]:
    """Series in an order compatible with the lag-0 edges, ties sorted."""
    series = sorted(f.series)
    children: dict[SeriesId, list[SeriesId]] = {s: [] for s in series}
    indeg = {s: 0 for s in series}
    for (a, b), ls in f.lags.items():
        if 0 in ls:
            children[a].append(b)
            indeg[b] += 1
    ready = sorted((s for s in series if indeg[s] == 0), reverse=True)
    out: list[SeriesId] = []
    while ready:
        s = ready.pop()
        out.append(s)
        bumped = False
        for c in children[s]:
            indeg[c] -= 1
            if indeg[c] == 0:
                ready.append(c)
                bumped = True
        if bumped:
            ready.sort(reverse=True)
    return out


class LinearDscm:
    """A full time graph with weights: the generating process of the data.

    ``coeffs`` must carry exactly one nonzero value per (from, to, lag)
    entry of the graph's lag pattern. ``noise_std`` is either one positive
    number for all series or a mapping per series.
    """

    __slots__ = ("ftcg", "coeffs", "noise_std")

    def __init__(
        self,
        ftcg: Ftcg,
        coeffs: Coeffs,
        noise_std: Union[float, Mapping[SeriesId, float]] = 1.0,
    ) -> None:
        self.ftcg = ftcg
        expected = {
            (a, b, l) for (a, b), ls in ftcg.lags.items() for l in ls
        }
        got = set(coeffs)
        if got != expected:
            missing = sorted(expected - got)
            extra = sorted(got - expected)
            parts = []
            if missing:
                parts.append(f"missing coefficients for {missing}")
            if extra:
                parts.append(f"coefficients without a matching edge: {extra}")
            raise ModelError("; ".join(parts))
        self.coeffs = {k: float(v) for k, v in coeffs.items()}
        for k, v in self.coeffs.items():
            if v == 0.0:
                raise ModelError(f"coefficient for {k} is zero; drop the edge instead")
        if isinstance(noise_std, Mapping):
            std = {s: float(noise_std.get(s, 0.0)) for s in ftcg.series}
        else:
            std = {s: float(noise_std) for s in ftcg.series}
        for s, v in std.items():
            if v <= 0.0:
                raise ModelError(f"noise level for {s} must be positive, got {v}")
        self.noise_std = std
        incoming: dict[SeriesId, float] = {s: 0.0 for s in ftcg.series}
        for (_, b, _), v in self.coeffs.items():
            incoming[b] += abs(v)
        for s, total in sorted(incoming.items()):
            if total > STABILITY_BOUND + 1e-9:
                raise ModelError(
                    f"unstable model: absolute incoming coefficients on {s} "
                    f"sum to {total:.3f} > {STABILITY_BOUND}"
                )

    @property
    def series_order(self) -> list[SeriesId]:
        return sorted(self.ftcg.series)

    def __repr__(self) -> str:
        return (
            f"LinearDscm({len(self.ftcg.series)} series, "
            f"{len(self.coeffs)} coefficients)"
        )


def random_linear_dscm(
    f: Ftcg, seed: int, noise_std: float = 1.0
) -> LinearDscm:
    """Draw coefficients of random sign, magnitude uniform in [0.2, 0.8].

    Magnitudes stay away from zero so a wrongly cut path shows up as real
    bias rather than noise. Incoming sums above the stability bound are
    rescaled onto it.
    """
    rng = np.random.default_rng(seed)
    triples = sorted((a, b, l) for (a, b), ls in f.lags.items() for l in ls)
    coeffs: dict[tuple[SeriesId, SeriesId, int], float] = {}
    for t in triples:
        sign = 1.0 if rng.random() < 0.5 else -1.0
        coeffs[t] = sign * rng.uniform(0.2, 0.8)
    incoming: dict[SeriesId, float] = {}
    for (_, b, _), v in coeffs.items():
        incoming[b] = incoming.get(b, 0.0) + abs(v)
    for (a, b, l), v in list(coeffs.items()):
        if incoming[b] > STABILITY_BOUND:
            coeffs[(a, b, l)] = v * STABILITY_BOUND / incoming[b]
    return LinearDscm(f, coeffs, noise_std)


@njit(cache=True)
def _drive(out, order, off, src, lag, val, iv_series, iv_time, iv_value):
    """Fill ``out`` (pre-loaded with noise) with the structural recursion.

    ``off``/``src``/``lag``/``val`` hold the incoming edges of each series
    in compressed rows; ``order`` lists series indices so that lag-0
    parents are always written before their children. A nonnegative
    ``iv_time`` clamps one occurrence in place of its equation.
    """
    n_t = out.shape[0]
    n_s = out.shape[1]
    for t in range(n_t):
        for k in range(n_s):
            s = order[k]
            acc = out[t, s]
            for j in range(off[s], off[s + 1]):
                tt = t - lag[j]
                if tt >= 0:
                    acc += val[j] * out[tt, src[j]]
            if s == iv_series and t == iv_time:
                acc = iv_value
            out[t, s] = acc


def _edge_rows(m: LinearDscm, index: dict[SeriesId, int]):
    """Incoming edges per series, compressed-row layout over series index."""
    n = len(index)
    rows: list[list[tuple[int, int, float]]] = [[] for _ in range(n)]
    for (a, b, l), v in m.coeffs.items():
        rows[index[b]].append((index[a], l, v))
    off = np.zeros(n + 1, dtype=np.int64)
    src, lag, val = [], [], []
    for i, row in enumerate(rows):
        row.sort()
        off[i + 1] = off[i] + len(row)
        for s, l, v in row:
            src.append(s)
            lag.append(l)
            val.append(v)
    return (
        off,
        np.array(src, dtype=np.int64),
        np.array(lag, dtype=np.int64),
        np.array(val, dtype=np.float64),
    )


def default_burn_in(f: Ftcg) -> int:
    return 10 * (f.max_lag + 1)


def simulate(
    m: LinearDscm,
    length: int,
    seed: int,
    intervention: Optional[tuple[TimedVertex, float]] = None,
    burn_in: Optional[int] = None,
) -> dict[SeriesId, np.ndarray]:
    """One trajectory of ``length`` steps after a discarded burn-in.

    ``intervention`` clamps a single occurrence: the vertex's time indexes
    the returned arrays (0-based), and its structural equation is replaced
    by the given value at that one step only. Repeating an intervention
    across reference times is the episode driver's job
    (``interventional_effect``), not this function's.
    """
    if length < 1:
        raise ModelError(f"length must be positive, got {length}")
    if burn_in is None:
        burn_in = default_burn_in(m.ftcg)
    order = _inst_order(m.ftcg)
    index = {s: i for i, s in enumerate(m.series_order)}
    order_arr = np.array([index[s] for s in order], dtype=np.int64)
    off, src, lag, val = _edge_rows(m, index)
    rng = np.random.default_rng(seed)
    total = burn_in + length
    out = rng.standard_normal((total, len(index)))
    for s, i in index.items():
        out[:, i] *= m.noise_std[s]
    iv_series, iv_time, iv_value = -1, -1, 0.0
    if intervention is not None:
        vertex, value = intervention
        if vertex.series not in index:
            raise ModelError(f"intervention series {vertex.series} is not in the model")
        if not 0 <= vertex.time < length:
            raise ModelError(
                f"intervention time {vertex.time} is outside the trajectory [0, {length})"
            )
        iv_series = index[vertex.series]
        iv_time = burn_in + vertex.time
        iv_value = float(value)
    _drive(out, order_arr, off, src, lag, val, iv_series, iv_time, iv_value)
    return {s: out[burn_in:, i].copy() for s, i in index.items()}


def true_total_effect(m: LinearDscm, q: Query, window: Optional[Window] = None) -> float:
    """Sum over directed paths of coefficient products, by forward sweep.

    Seeds the cause's occurrence with 1 and pushes products along edges;
    the seed's own equation is cut, as an intervention would. Directed
    paths never move backward in time, so offsets -lag .. 0 suffice.
    """
    q.check_series(m.ftcg.series)
    if window is not None and (window.t_min > -q.lag or window.t_max < 0):
        raise QueryError(f"window {window} does not cover the query offsets")
    order = _inst_order(m.ftcg)
    eff: dict[tuple[SeriesId, int], float] = {}
    for offset in range(-q.lag, 1):
        for s in order:
            if s == q.cause and offset == -q.lag:
                eff[(s, offset)] = 1.0
                continue
            acc = 0.0
            for (a, b, l), v in m.coeffs.items():
                if b != s:
                    continue
                prev = eff.get((a, offset - l))
                if prev is not None:
                    acc += v * prev
            eff[(s, offset)] = acc
    return eff[(q.effect, 0)]


def _column(data: Mapping[SeriesId, np.ndarray], v: TimedVertex, refs: np.ndarray) -> np.ndarray:
    return data[v.series][refs + v.time]


def estimate_adjusted(
    data: Mapping[SeriesId, np.ndarray],
    q: Query,
    z: Iterable[TimedVertex],
) -> OlsEffect:
    """Slope of the cause in a regression of the effect on cause plus ``z``.

    Reference times are stacked as samples; rows where any column would
    reach outside the data are dropped at the edges. With Gaussian noise
    this is exactly the adjustment formula for the set ``z``.
    """
    zs = sorted(set(z), key=lambda v: (v.time, v.series))
    needed = [TimedVertex(q.effect, 0), q.cause_vertex, *zs]
    lengths = set()
    for v in needed:
        if v.series not in data:
            raise ModelError(f"data has no column for series {v.series}")
        lengths.add(len(data[v.series]))
    if len(lengths) != 1:
        raise ModelError("data columns disagree on length")
    (n_t,) = lengths
    lead = max(0, max(-v.time for v in needed))
    tail = max(0, max(v.time for v in needed))
    n = n_t - lead - tail
    k = 2 + len(zs)
    if n <= k:
        raise ModelError(f"only {n} usable reference times for {k} regressors")
    refs = np.arange(lead, n_t - tail)
    y = _column(data, TimedVertex(q.effect, 0), refs)
    design = np.empty((n, k))
    design[:, 0] = 1.0
    design[:, 1] = _column(data, q.cause_vertex, refs)
    for i, v in enumerate(zs):
        design[:, 2 + i] = _column(data, v, refs)
    names = ["intercept", q.cause_vertex.label(), *(v.label() for v in zs)]
    rank = np.linalg.matrix_rank(design)
    if rank < k:
        culprits = []
        kept = design[:, :1]
        for i in range(1, k):
            trial = np.hstack([kept, design[:, i : i + 1]])
            if np.linalg.matrix_rank(trial) == kept.shape[1]:
                culprits.append(names[i])
            else:
                kept = trial
        raise ModelError(f"collinear regression columns: {', '.join(culprits)}")
    coef, _, _, _ = np.linalg.lstsq(design, y, rcond=None)
    resid = y - design @ coef
    sigma2 = float(resid @ resid) / (n - k)
    cov = sigma2 * np.linalg.inv(design.T @ design)
    return OlsEffect(float(coef[1]), float(np.sqrt(cov[1, 1])), n)


def interventional_effect(
    m: LinearDscm,
    q: Query,
    episodes: int,
    seed: int,
    burn_in: int = 30,
) -> OlsEffect:
    """Regress the effect on a random dose forced into the cause.

    Runs ``episodes`` independent trajectories in parallel lanes: each
    burns in, clamps the cause's occurrence to a standard-normal dose,
    steps forward ``lag`` more times, and reads the effect once. The slope
    of outcome on dose estimates the same number ``true_total_effect``
    computes exactly.
    """
    q.check_series(m.ftcg.series)
    if episodes < 3:
        raise ModelError(f"need at least 3 episodes, got {episodes}")
    order = _inst_order(m.ftcg)
    index = {s: i for i, s in enumerate(m.series_order)}
    off, src, lag, val = _edge_rows(m, index)
    std = np.array([m.noise_std[s] for s in m.series_order])
    rng = np.random.default_rng(seed)
    doses = rng.standard_normal(episodes)
    depth = m.ftcg.max_lag + 1
    buf = np.zeros((depth, episodes, len(index)))
    total = burn_in + q.lag + 1
    clamp_t = burn_in
    ix, iy = index[q.cause], index[q.effect]
    for t in range(total):
        row = t % depth
        noise = rng.standard_normal((episodes, len(index))) * std
        for s in order:
            i = index[s]
            acc = noise[:, i].copy()
            for j in range(off[i], off[i + 1]):
                tt = t - lag[j]
                if tt >= 0:
                    acc += val[j] * buf[tt % depth, :, src[j]]
            if t == clamp_t and i == ix:
                acc = doses
            buf[row, :, i] = acc
    y = buf[(total - 1) % depth, :, iy]
    design = np.column_stack([np.ones(episodes), doses])
    coef, _, _, _ = np.linalg.lstsq(design, y, rcond=None)
    resid = y - design @ coef
    sigma2 = float(resid @ resid) / (episodes - 2)
    cov = sigma2 * np.linalg.inv(design.T @ design)
    return OlsEffect(float(coef[1]), float(np.sqrt(cov[1, 1])), episodes)


def write_csv(data: Mapping[SeriesId, np.ndarray], fh: IO[str]) -> None:
    """One column per series (sorted header), one row per time step."""
    names = sorted(data)
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(names)
    for row in zip(*(data[s] for s in names)):
        writer.writerow([repr(float(v)) for v in row])
