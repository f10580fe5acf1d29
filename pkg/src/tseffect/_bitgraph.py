"""Compiled sweeps over whole candidate families.

The oracle has to run the same small graph checks millions of times: one
unrolled candidate graph per combination of per-edge lag choices. Doing
that through the object layer would dominate the test budget, so this
module redoes the inner loop on flat int64 arrays under numba.

Vertices of the unrolled window graph are numbered ``(time_index *
n_series + series_index)`` and adjacency lives in per-vertex bitmasks, so
the whole graph must fit in 62 bits. Candidate enumeration is mixed-radix:
each ordered series pair carries a list of admissible lag bitmasks and the
rightmost pair varies fastest. The pure-python enumeration in
``oracle.py`` walks candidates in exactly this order; every index
returned here can be decoded back to the same graph there. Violation
hits are re-verified by the object layer before being reported, so these
kernels only ever steer where to look.

Shared argument block for every driver below:

- ``n_pairs``, ``gmax1``: pair count and ``max_lag + 1``.
- ``ch_off``, ``ch_masks``: choice table; pair ``p`` picks one lag bitmask
  from ``ch_masks[ch_off[p] : ch_off[p+1]]`` (bit ``l`` = lag ``l``).
- ``pl_off``, ``pl_src``, ``pl_dst``: edge placements; slot
  ``p * gmax1 + l`` holds the window edges contributed by pair ``p`` at
  lag ``l``.
"""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True)
def _rebuild(parent, child, idx, n, n_pairs, gmax1, ch_off, ch_masks, pl_off, pl_src, pl_dst):
    for i in range(n):
        parent[i] = 0
        child[i] = 0
    for p in range(n_pairs):
        mask = ch_masks[ch_off[p] + idx[p]]
        base = p * gmax1
        for l in range(gmax1):
            if (mask >> l) & 1:
                for k in range(pl_off[base + l], pl_off[base + l + 1]):
                    a = pl_src[k]
                    b = pl_dst[k]
                    child[a] |= np.int64(1) << b
                    parent[b] |= np.int64(1) << a


@njit(cache=True)
def _advance(idx, n_pairs, ch_off):
    p = n_pairs - 1
    while p >= 0:
        idx[p] += 1
        if idx[p] < ch_off[p + 1] - ch_off[p]:
            return
        idx[p] = 0
        p -= 1


@njit(cache=True)
def _reach_down(child, n, start, stack):
    """Bitmask of vertices reachable from ``start`` along edges, inclusive."""
    reach = np.int64(1) << start
    sp = 0
    stack[sp] = start
    sp += 1
    while sp > 0:
        sp -= 1
        fresh = child[stack[sp]] & ~reach
        reach |= fresh
        for j in range(n):
            if (fresh >> j) & 1:
                stack[sp] = j
                sp += 1
    return reach


@njit(cache=True)
def _active_walk(parent, child, n, ix, iy, zmask, stack):
    """Whether some backdoor walk from ``ix`` reaches ``iy`` active given
    ``zmask``, with the outgoing edges of ``ix`` dropped.

    Ball-passing over states (vertex, arrived-from-child?). Arriving from
    a child means the previous step left along an outgoing edge, so the
    vertex can never be a collider there: it passes the ball anywhere
    unless conditioned. Arriving from a parent, it passes down when not
    conditioned and bounces up to its parents when conditioned. Sound for
    backdoor paths only when ``zmask`` holds no descendant of ``ix``;
    callers establish that first.
    """
    xbit = np.int64(1) << ix
    up_seen = xbit
    dn_seen = np.int64(0)
    sp = 0
    stack[sp] = 2 * ix + 1
    sp += 1
    while sp > 0:
        sp -= 1
        v = stack[sp] >> 1
        from_child = stack[sp] & 1
        in_z = (zmask >> v) & 1
        t_up = np.int64(0)
        t_dn = np.int64(0)
        if from_child == 1:
            if in_z == 0:
                t_up = parent[v] & ~xbit
                t_dn = child[v]
        else:
            if in_z == 0:
                t_dn = child[v]
            else:
                t_up = parent[v] & ~xbit
        if v == ix:
            t_dn = np.int64(0)
        new_up = t_up & ~up_seen
        new_dn = t_dn & ~dn_seen
        if ((new_up | new_dn) >> iy) & 1:
            return True
        up_seen |= new_up
        dn_seen |= new_dn
        for j in range(n):
            if (new_up >> j) & 1:
                stack[sp] = 2 * j + 1
                sp += 1
            if (new_dn >> j) & 1:
                stack[sp] = 2 * j
                sp += 1
    return False


@njit(cache=True)
def check_block(n, ix, iy, zmask, n_pairs, gmax1, ch_off, ch_masks, pl_off, pl_src, pl_dst):
    """Run the standard backdoor check over one block of candidates.

    Returns ``(flat, kind)`` for the first failing candidate: kind 1 when
    the conditioning set holds a descendant of the cause, kind 2 when an
    active backdoor walk survives. ``(-1, 0)`` when the whole block passes.
    """
    parent = np.zeros(n, np.int64)
    child = np.zeros(n, np.int64)
    idx = np.zeros(n_pairs, np.int64)
    stack = np.empty(2 * n + 2, np.int64)
    total = np.int64(1)
    for p in range(n_pairs):
        total *= ch_off[p + 1] - ch_off[p]
    for flat in range(total):
        _rebuild(parent, child, idx, n, n_pairs, gmax1, ch_off, ch_masks, pl_off, pl_src, pl_dst)
        if _reach_down(child, n, ix, stack) & zmask:
            return flat, 1
        if _active_walk(parent, child, n, ix, iy, zmask, stack):
            return flat, 2
        _advance(idx, n_pairs, ch_off)
    return np.int64(-1), np.int64(0)


@njit(cache=True)
def early_blocking_block(
    n, vtime, gamma, gmax, n_pairs, gmax1, ch_off, ch_masks, pl_off, pl_src, pl_dst
):
    """Certify the early-blocking argument over one block of candidates.

    Any path from the effect time back past the intervention time must
    cross the boundary on some edge ``w -> u`` with ``time(w) <= -gamma-1``
    and ``time(u) >= -gamma``. Lags never exceed ``gmax`` and never run
    backwards, so ``w`` is forced into the band
    ``[-gamma-gmax, -gamma-1]`` where the history adjustment set holds
    every series, and the outgoing mark at ``w`` makes it a definite
    non-collider there. This kernel re-verifies both facts edge by edge:
    kind 1 flags a crossing edge whose source escapes the band, kind 2 an
    edge running against time. A clean pass means every backdoor path that
    reaches past the intervention time is blocked.
    """
    idx = np.zeros(n_pairs, np.int64)
    total = np.int64(1)
    for p in range(n_pairs):
        total *= ch_off[p + 1] - ch_off[p]
    for flat in range(total):
        for p in range(n_pairs):
            mask = ch_masks[ch_off[p] + idx[p]]
            base = p * gmax1
            for l in range(gmax1):
                if (mask >> l) & 1:
                    for k in range(pl_off[base + l], pl_off[base + l + 1]):
                        tw = vtime[pl_src[k]]
                        tu = vtime[pl_dst[k]]
                        if tw > tu:
                            return flat, 2
                        if tw <= -gamma - 1 and tu >= -gamma and tw < -gamma - gmax:
                            return flat, 1
        _advance(idx, n_pairs, ch_off)
    return np.int64(-1), np.int64(0)


@njit(cache=True)
def incompatible_ambiguous_block(
    n,
    ix,
    iy,
    region,
    series_of,
    n_allowed,
    allowed,
    out_path,
    n_pairs,
    gmax1,
    ch_off,
    ch_masks,
    pl_off,
    pl_src,
    pl_dst,
):
    """Hunt one block for a backdoor path that stays at or after the
    intervention time yet runs through series no summary-graph backdoor
    path can account for.

    ``region`` masks the vertices at time >= -gamma; a path confined to it
    contains no vertex before the intervention time. ``allowed[i]`` is the
    series bitmask that the i-th summary-graph backdoor path can explain
    as interior vertices; a found path's interior series set must escape
    every one of them (with no summary backdoor paths at all, any such
    path qualifies). Returns ``(flat, length)`` with the path's vertex
    indices in ``out_path``, or ``(-1, 0)``.
    """
    parent = np.zeros(n, np.int64)
    child = np.zeros(n, np.int64)
    idx = np.zeros(n_pairs, np.int64)
    pathv = np.empty(n + 1, np.int64)
    rem = np.empty(n + 1, np.int64)
    total = np.int64(1)
    for p in range(n_pairs):
        total *= ch_off[p + 1] - ch_off[p]
    xbit = np.int64(1) << ix
    for flat in range(total):
        _rebuild(parent, child, idx, n, n_pairs, gmax1, ch_off, ch_masks, pl_off, pl_src, pl_dst)
        d = 0
        pathv[0] = ix
        onpath = xbit
        rem[0] = parent[ix] & region & ~xbit
        while d >= 0:
            if rem[d] == 0:
                onpath &= ~(np.int64(1) << pathv[d])
                d -= 1
                continue
            low = rem[d] & (-rem[d])
            rem[d] &= rem[d] - 1
            w = 0
            while ((low >> w) & 1) == 0:
                w += 1
            if w == iy:
                smask = np.int64(0)
                for k in range(1, d + 1):
                    smask |= np.int64(1) << series_of[pathv[k]]
                explained = False
                for a in range(n_allowed):
                    if smask & ~allowed[a] == 0:
                        explained = True
                        break
                if not explained:
                    for k in range(d + 1):
                        out_path[k] = pathv[k]
                    out_path[d + 1] = iy
                    return flat, np.int64(d + 2)
                continue
            d += 1
            pathv[d] = w
            onpath |= low
            rem[d] = (parent[w] | child[w]) & region & ~onpath
        _advance(idx, n_pairs, ch_off)
    return np.int64(-1), np.int64(0)
