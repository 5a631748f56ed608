"""Growth of the three affine preferential-attachment models.

Two implementations of the same law live here on purpose:

* :func:`init` / :func:`step` is the readable reference path, one
  attachment record at a time, built on the draw helpers below.
* ``_grow_a`` / ``_grow_b`` / ``_grow_c`` are inlined kernels used by
  :func:`generate`; they make bit-identical PRNG calls to the
  reference path (the test suite compares whole event logs), but run
  several times faster, which matters at t = 10^7.

All sampling is integer-exact: delta = p/q and every acceptance or
mixture decision reduces to one uniform integer draw (see
:mod:`palab.sampler`).  Variants "a"/"b" with m > 1 are produced by
running the m = 1 process with offset delta/m for m*t steps and
collapsing consecutive blocks of m vertices.
"""

from __future__ import annotations

import random
from array import array
from dataclasses import dataclass, field

import numpy as np

from .graph import PAGraph
from .params import PAParams
from .sampler import randbelow

RNG_NAME = "mt19937"

# generate() refuses jobs above this edge count unless told otherwise;
# peak memory is roughly 16-24 bytes per edge.
DEFAULT_MAX_EDGES = 2 ** 26


def _draw_noself(rng, ends, deg, t, p, q):
    """One target among [t] with P(i) = (D_i + p/q) / (t*(2m + p/q)).

    Used by variant "b" steps and by each of the m frozen draws of
    variant "c" (caller must not have appended the new endpoints yet).
    """
    if p >= 0:
        w = q * len(ends) + p * t
        r = randbelow(rng, w)
        if r < p * t:
            return 1 + r // p
        return ends[(r - p * t) // q]
    while True:
        i = ends[randbelow(rng, len(ends))]
        qd = q * deg[i]
        if randbelow(rng, qd) < qd + p:
            return i


def _draw_self(rng, ends, deg, t, p, q):
    """Variant "a" target among [t+1]: the new vertex rides along with
    weight 1 + p/q (a phantom endpoint of degree 1)."""
    if p >= 0:
        w = q * (len(ends) + 1) + p * (t + 1)
        r = randbelow(rng, w)
        if r < p * (t + 1):
            return 1 + r // p
        idx = (r - p * (t + 1)) // q
        return ends[idx] if idx < len(ends) else t + 1
    n1 = len(ends) + 1
    while True:
        k = randbelow(rng, n1)
        if k < n1 - 1:
            i = ends[k]
            d = deg[i]
        else:
            i = t + 1
            d = 1
        qd = q * d
        if randbelow(rng, qd) < qd + p:
            return i


@dataclass
class GrowthState:
    """Mutable state of the process actually being stepped.

    For variants "a"/"b" with m > 1, ``proc`` is the m = 1 process with
    offset delta/m; ``params`` keeps the requested model.  One call to
    :func:`step` advances ``proc`` by one vertex, so reaching the model
    at time t takes m*t - proc-start steps, then :func:`freeze`
    collapses.
    """

    params: PAParams
    proc: PAParams
    t: int
    deg: list = field(repr=False)        # 1-based degrees of proc
    ends: list = field(repr=False)       # half-edge endpoint list of proc
    targets: list = field(repr=False)    # event log of proc

    def total_weight(self):
        """sum(D_i + delta') over current vertices, exact."""
        return len(self.ends) + self.proc.delta * self.t

    def sum_degrees(self) -> int:
        return len(self.ends)


def init(params: PAParams) -> GrowthState:
    """Initial state: a(m=1) t=1 self-loop; b(m=1) t=2 double edge;
    c t=2 with 2m parallel edges.  a/b with m>1 start the m=1 process."""
    proc = params if params.variant == "c" or params.m == 1 else params.m1_params()
    if proc.variant == "a":
        return GrowthState(params, proc, t=1, deg=[0, 2], ends=[1, 1], targets=[1])
    if proc.variant == "b":
        return GrowthState(params, proc, t=2, deg=[0, 2, 2], ends=[1, 1, 2, 2], targets=[1, 1])
    m = proc.m
    return GrowthState(params, proc, t=2, deg=[0, 2 * m, 2 * m],
                       ends=[1] * (2 * m) + [2] * (2 * m), targets=[1] * (2 * m))


def step(state: GrowthState, rng):
    """Add one vertex to the running process; returns its target(s).

    Variant "c" returns a tuple of m targets (drawn against degrees
    frozen at the current time); m = 1 variants return one int, equal
    to t+1 exactly when variant "a" drew a self-loop.
    """
    proc = state.proc
    p, q = proc.delta_as_ratio()
    t, deg, ends = state.t, state.deg, state.ends
    if proc.variant == "c":
        m = proc.m
        drawn = [_draw_noself(rng, ends, deg, t, p, q) for _ in range(m)]
        for tgt in drawn:
            ends.append(tgt)
            deg[tgt] += 1
        ends.extend([t + 1] * m)
        deg.append(m)
        state.targets.extend(drawn)
        state.t = t + 1
        return tuple(drawn)
    if proc.variant == "a":
        tgt = _draw_self(rng, ends, deg, t, p, q)
        if tgt == t + 1:
            ends.append(t + 1)
            ends.append(t + 1)
            deg.append(2)
        else:
            ends.append(tgt)
            ends.append(t + 1)
            deg[tgt] += 1
            deg.append(1)
    else:
        tgt = _draw_noself(rng, ends, deg, t, p, q)
        ends.append(tgt)
        ends.append(t + 1)
        deg[tgt] += 1
        deg.append(1)
    state.targets.append(tgt)
    state.t = t + 1
    return tgt


def freeze(state: GrowthState, seed=None) -> PAGraph:
    """Snapshot the stepped process as a PAGraph, collapsing if needed."""
    g = PAGraph(params=state.proc, t=state.t,
                targets=np.asarray(state.targets, dtype=np.int32),
                degrees=np.asarray([0] + state.deg[1:], dtype=np.int64),
                seed=seed, rng_name=RNG_NAME)
    if state.proc is not state.params:
        g = collapse(g, state.params.m)
    g.validate()
    return g


def collapse(g1: PAGraph, m: int) -> PAGraph:
    """Identify blocks of m consecutive vertices of an m=1 graph.

    Vertex j of the result aggregates vertices (j-1)m+1 .. jm; edge
    indices are preserved and targets map by s -> ceil(s/m), so
    intra-block edges become self-loops.  The offset rescales from
    delta' to m*delta'.
    """
    if g1.params.m != 1:
        raise ValueError("collapse expects an m=1 graph")
    if g1.params.variant == "c":
        raise ValueError("variant c is generated directly, not collapsed")
    if g1.t % m != 0:
        raise ValueError(f"time {g1.t} not divisible by m={m}")
    if m == 1:
        return g1
    t = g1.t // m
    params = PAParams(g1.params.variant, m, g1.params.delta * m)
    targets = ((np.asarray(g1.targets, dtype=np.int64) + m - 1) // m).astype(np.int32)
    deg = np.zeros(t + 1, dtype=np.int64)
    deg[1:] = np.add.reduceat(g1.degrees[1:], np.arange(0, g1.t, m))
    return PAGraph(params=params, t=t, targets=targets, degrees=deg,
                   seed=g1.seed, rng_name=g1.rng_name)


def generate(params: PAParams, t: int, seed: int, max_edges: int = DEFAULT_MAX_EDGES) -> PAGraph:
    """Grow a frozen graph with t vertices and m*t edges, reproducibly.

    Same (params, t, seed, format_version) always yields a bit-identical
    event log.  Refuses jobs with m*t > max_edges (memory guard).
    """
    t_min = 1 if params.variant == "a" else 2
    if t < t_min:
        raise ValueError(f"variant {params.variant} needs t >= {t_min}")
    if params.m * t > max_edges:
        raise ValueError(f"m*t = {params.m * t} exceeds max_edges = {max_edges}; "
                         "raise max_edges if you really have the memory")
    rng = random.Random(seed)
    if params.variant == "c":
        targets, deg = _grow_c(t, params.m, *params.delta_as_ratio(), rng)
        g = PAGraph(params=params, t=t, targets=targets, degrees=deg,
                    seed=seed, rng_name=RNG_NAME)
    else:
        proc = params if params.m == 1 else params.m1_params()
        p, q = proc.delta_as_ratio()
        T = params.m * t
        kernel = _grow_a if params.variant == "a" else _grow_b
        targets, deg = kernel(T, p, q, rng)
        g = PAGraph(params=proc, t=T, targets=targets, degrees=deg,
                    seed=seed, rng_name=RNG_NAME)
        if params.m > 1:
            g = collapse(g, params.m)
    g.validate()
    return g


# -- inlined kernels ---------------------------------------------------------
# Same draw logic as _draw_self/_draw_noself with randbelow unrolled.
# Do not "clean up" by re-introducing function calls: the per-edge cost
# is what keeps t=10^7 under a minute.

def _to_arrays(targets, deg):
    tg = np.frombuffer(targets, dtype=np.int32).copy()
    dg = np.zeros(len(deg), dtype=np.int64)
    dg[1:] = np.frombuffer(deg, dtype=np.int32)[1:]
    return tg, dg


def _grow_a(T, p, q, rng):
    targets = array("i", bytes(4 * T))
    ends = array("i", bytes(4 * 2 * T))
    deg = array("i", bytes(4 * (T + 1)))
    grb = rng.getrandbits
    targets[0] = 1
    ends[0] = 1
    ends[1] = 1
    deg[1] = 2
    L = 2
    for t in range(1, T):
        if p >= 0:
            w = q * (L + 1) + p * (t + 1)
            k = (w - 1).bit_length()
            r = grb(k)
            while r >= w:
                r = grb(k)
            if r < p * (t + 1):
                tgt = 1 + r // p
            else:
                idx = (r - p * (t + 1)) // q
                tgt = ends[idx] if idx < L else t + 1
        else:
            n1 = L + 1
            k = (n1 - 1).bit_length()
            while True:
                r = grb(k)
                while r >= n1:
                    r = grb(k)
                if r < L:
                    tgt = ends[r]
                    qd = q * deg[tgt]
                else:
                    tgt = t + 1
                    qd = q
                kk = (qd - 1).bit_length()
                rr = grb(kk)
                while rr >= qd:
                    rr = grb(kk)
                if rr < qd + p:
                    break
        targets[t] = tgt
        if tgt == t + 1:
            ends[L] = tgt
            ends[L + 1] = tgt
            deg[tgt] = 2
        else:
            ends[L] = tgt
            ends[L + 1] = t + 1
            deg[tgt] += 1
            deg[t + 1] = 1
        L += 2
    return _to_arrays(targets, deg)


def _grow_b(T, p, q, rng):
    targets = array("i", bytes(4 * T))
    ends = array("i", bytes(4 * 2 * T))
    deg = array("i", bytes(4 * (T + 1)))
    grb = rng.getrandbits
    targets[0] = 1
    targets[1] = 1
    ends[0] = 1
    ends[1] = 1
    ends[2] = 2
    ends[3] = 2
    deg[1] = 2
    deg[2] = 2
    L = 4
    for t in range(2, T):
        if p >= 0:
            w = q * L + p * t
            k = (w - 1).bit_length()
            r = grb(k)
            while r >= w:
                r = grb(k)
            if r < p * t:
                tgt = 1 + r // p
            else:
                tgt = ends[(r - p * t) // q]
        else:
            k = (L - 1).bit_length()
            while True:
                r = grb(k)
                while r >= L:
                    r = grb(k)
                tgt = ends[r]
                qd = q * deg[tgt]
                kk = (qd - 1).bit_length()
                rr = grb(kk)
                while rr >= qd:
                    rr = grb(kk)
                if rr < qd + p:
                    break
        targets[t] = tgt
        ends[L] = tgt
        ends[L + 1] = t + 1
        deg[tgt] += 1
        deg[t + 1] = 1
        L += 2
    return _to_arrays(targets, deg)


def _grow_c(T, m, p, q, rng):
    targets = array("i", bytes(4 * m * T))
    ends = array("i", bytes(4 * 2 * m * T))
    deg = array("i", bytes(4 * (T + 1)))
    grb = rng.getrandbits
    for e in range(2 * m):
        targets[e] = 1
    for e in range(2 * m):
        ends[e] = 1
        ends[2 * m + e] = 2
    deg[1] = 2 * m
    deg[2] = 2 * m
    L = 4 * m
    drawn = [0] * m
    for t in range(2, T):
        base = m * t
        # the m draws all see length-L ends and time-t weights (frozen)
        for j in range(m):
            if p >= 0:
                w = q * L + p * t
                k = (w - 1).bit_length()
                r = grb(k)
                while r >= w:
                    r = grb(k)
                if r < p * t:
                    tgt = 1 + r // p
                else:
                    tgt = ends[(r - p * t) // q]
            else:
                k = (L - 1).bit_length()
                while True:
                    r = grb(k)
                    while r >= L:
                        r = grb(k)
                    tgt = ends[r]
                    qd = q * deg[tgt]
                    kk = (qd - 1).bit_length()
                    rr = grb(kk)
                    while rr >= qd:
                        rr = grb(kk)
                    if rr < qd + p:
                        break
            targets[base + j] = tgt
            drawn[j] = tgt
        for j in range(m):
            tgt = drawn[j]
            ends[L + j] = tgt
            deg[tgt] += 1
        nxt = t + 1
        for j in range(m):
            ends[L + m + j] = nxt
        deg[nxt] = m
        L += 2 * m
    return _to_arrays(targets, deg)
