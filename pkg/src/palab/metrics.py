"""Distances, diameter, components, and degree statistics.

Distance semantics: edges are undirected, self-loops and edge
multiplicity are irrelevant, so the event log is flattened once into a
deduplicated CSR adjacency (cached on the graph).  BFS is
level-synchronous over numpy arrays, which keeps single-source sweeps
at a few milliseconds even at t around 10^6.

Unreachable vertices carry distance -1 in the int32 arrays (documented
stand-in for infinity; vertex slot 0 is unused and also -1).
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field

import numpy as np

from .graph import PAGraph
from .sampler import randbelow

DEFAULT_MAX_EXACT_VERTICES = 2 ** 15


@dataclass
class Adjacency:
    t: int
    indptr: np.ndarray  # int64, length t+2
    indices: np.ndarray  # int32, neighbor lists sorted ascending

    def degree(self, i):
        return int(self.indptr[i + 1] - self.indptr[i])


def adjacency(graph: PAGraph) -> Adjacency:
    """Simple undirected adjacency from the event log, cached."""
    cached = graph.__dict__.get("_adjacency")
    if cached is not None:
        return cached
    t, m = graph.t, graph.m
    c = graph.children().astype(np.int64)
    s = graph.targets.astype(np.int64)
    if graph.bundle:
        # vertex 1's rows are the initial parallel edges {1,2}
        c = c.copy()
        c[:m] = 1
        s = s.copy()
        s[:m] = 2
    keep = c != s  # self-loops never shorten a path
    c, s = c[keep], s[keep]
    key = np.concatenate([c * (t + 1) + s, s * (t + 1) + c])
    key = np.unique(key)
    u = (key // (t + 1)).astype(np.int64)
    v = (key % (t + 1)).astype(np.int32)
    indptr = np.zeros(t + 2, dtype=np.int64)
    np.cumsum(np.bincount(u, minlength=t + 1), out=indptr[1:])
    adj = Adjacency(t=t, indptr=indptr, indices=v)
    graph.__dict__["_adjacency"] = adj
    return adj


def _bfs_dist(adj: Adjacency, src: int, until: int = -1) -> np.ndarray:
    """Distances from src; -1 where unreachable.  Stops early once
    `until` (if >= 1) has been labeled."""
    indptr, indices = adj.indptr, adj.indices
    dist = np.full(adj.t + 1, -1, dtype=np.int32)
    dist[src] = 0
    frontier = np.array([src], dtype=np.int64)
    d = 0
    while frontier.size:
        if until >= 1 and dist[until] >= 0:
            break
        starts = indptr[frontier]
        counts = indptr[frontier + 1] - starts
        total = int(counts.sum())
        if total == 0:
            break
        # gather all neighbor slices in one shot
        offs = np.repeat(starts, counts)
        within = np.arange(total, dtype=np.int64) - np.repeat(np.cumsum(counts) - counts, counts)
        nbr = indices[offs + within]
        fresh = nbr[dist[nbr] < 0]
        if fresh.size == 0:
            break
        d += 1
        frontier = np.unique(fresh).astype(np.int64)
        dist[frontier] = d
    return dist


@dataclass
class DistanceReport:
    source: int
    dist: np.ndarray  # int32; -1 marks unreachable (infinite distance)
    eccentricity: int  # max finite distance from source
    n_reached: int

    def distance(self, j: int) -> int:
        return int(self.dist[j])


def bfs(graph: PAGraph, src: int) -> DistanceReport:
    """Exact shortest-path distances from src (undirected, unweighted)."""
    if not (1 <= src <= graph.t):
        raise IndexError(f"source {src} out of range")
    dist = _bfs_dist(adjacency(graph), src)
    return DistanceReport(source=src, dist=dist,
                          eccentricity=int(dist.max()),
                          n_reached=int(np.count_nonzero(dist >= 0)))


@dataclass
class DiameterResult:
    lower: int
    upper: int
    method: str  # "exact" or "double-sweep-bound"
    witness: tuple[int, int]  # pair realizing the lower bound
    eccentricities: np.ndarray | None = field(default=None, repr=False)

    @property
    def value(self) -> int:
        if self.lower != self.upper:
            raise ValueError(f"diameter only bracketed: [{self.lower}, {self.upper}]")
        return self.lower

    @property
    def exact(self) -> bool:
        return self.lower == self.upper


def components(graph: PAGraph):
    """(count, labels): labels[i] in 1..count for i in 1..t, labels[0]=0.

    Variants b/c are connected by construction and that is asserted;
    variant a additionally cross-checks the count against the self-loop
    births of the m=1 process (each self-loop after vertex 1 opens a
    new component).
    """
    adj = adjacency(graph)
    labels = np.zeros(graph.t + 1, dtype=np.int32)
    count = 0
    unseen = labels[1:] == 0
    while True:
        free = np.flatnonzero(unseen)
        if free.size == 0:
            break
        src = int(free[0]) + 1
        count += 1
        dist = _bfs_dist(adj, src)
        member = dist >= 0
        labels[member] = count
        unseen &= ~member[1:]
    if graph.params.variant in ("b", "c") and count != 1:
        raise AssertionError(f"variant {graph.params.variant} must be connected, found {count} components")
    if graph.params.variant == "a" and graph.m == 1:
        loops_after_first = int(np.count_nonzero(graph.selfloop_mask()[1:]))
        if count != 1 + loops_after_first:
            raise AssertionError(f"component count {count} != 1 + {loops_after_first} self-loop births")
    return count, labels


def _component_vertex_lists(graph: PAGraph):
    count, labels = components(graph)
    return [np.flatnonzero(labels == c).astype(np.int64) for c in range(1, count + 1)]


def _exact_component_diameter(adj, verts):
    lower, witness, eccs = 0, (int(verts[0]), int(verts[0])), []
    for src in verts:
        dist = _bfs_dist(adj, int(src))
        e = int(dist.max())
        eccs.append(e)
        if e > lower:
            lower = e
            witness = (int(src), int(np.argmax(dist)))
    return lower, witness, eccs


def _ifub_component(adj, verts, bfs_budget):
    """diameter bracket of one component: double sweep, then iFUB
    refinement from a middle vertex until the bracket closes or the
    BFS budget runs out.  The bracket is always valid."""
    degs = adj.indptr[verts + 1] - adj.indptr[verts]
    u = int(verts[int(np.argmax(degs))])
    used = 0
    lb, witness = 0, (u, u)

    def sweep(src):
        nonlocal used, lb, witness
        used += 1
        dist = _bfs_dist(adj, src)
        e = int(dist.max())
        if e > lb:
            lb = e
            witness = (src, int(np.argmax(dist)))
        return dist, e

    du, ecc_u = sweep(u)
    a = int(np.argmax(du))
    da, ecc_a = sweep(a)
    b = int(np.argmax(da))
    db, ecc_b = sweep(b)
    # a middle vertex of a shortest a-b path
    on_path = np.flatnonzero((da + db == ecc_a) & (da == ecc_a // 2))
    r = int(on_path[0]) if on_path.size else b
    dr, ecc_r = sweep(r)
    ub = max(lb, 2 * ecc_r)
    if verts.size <= 2:
        return lb, lb, witness
    levels = dr[verts]
    order = verts[np.argsort(levels)[::-1]]
    pos = 0
    while ub > lb and used < bfs_budget and pos < order.size:
        v = int(order[pos])
        i = int(dr[v])
        if lb >= 2 * i:
            ub = lb
            break
        sweep(v)
        pos += 1
        nxt = int(dr[int(order[pos])]) if pos < order.size else 0
        if nxt < i:  # level i exhausted
            ub = min(ub, max(lb, 2 * (i - 1)))
    return lb, ub, witness


def diameter(graph: PAGraph, method: str = "auto",
             max_exact_vertices: int = DEFAULT_MAX_EXACT_VERTICES,
             force: bool = False, bfs_budget: int = 256) -> DiameterResult:
    """Max graph distance over connected pairs.

    method "exact" runs all-sources BFS (refused above
    max_exact_vertices unless force=True); "bounds" runs a per-component
    double sweep plus iFUB refinement and reports a guaranteed bracket,
    tagged double-sweep-bound even when it happens to close.  "auto"
    picks exact for small graphs.
    """
    if method == "auto":
        method = "exact" if graph.t <= max_exact_vertices else "bounds"
    if method not in ("exact", "bounds"):
        raise ValueError(f"unknown method {method!r}")
    if method == "exact" and graph.t > max_exact_vertices and not force:
        raise ValueError(f"t={graph.t} exceeds exact budget {max_exact_vertices}; "
                         "pass force=True or use method='bounds'")
    adj = adjacency(graph)
    comps = _component_vertex_lists(graph)
    if method == "exact":
        lower, witness = 0, (1, 1)
        eccs = np.zeros(graph.t + 1, dtype=np.int32)
        for verts in comps:
            lo, wit, ce = _exact_component_diameter(adj, verts)
            eccs[verts] = ce
            if lo > lower:
                lower, witness = lo, wit
        return DiameterResult(lower=lower, upper=lower, method="exact",
                              witness=witness, eccentricities=eccs)
    lower, upper, witness = 0, 0, (1, 1)
    for verts in comps:
        if verts.size == 1:
            continue
        lo, ub, wit = _ifub_component(adj, verts, bfs_budget)
        if lo > lower:
            lower, witness = lo, wit
        upper = max(upper, ub)
    upper = max(upper, lower)
    return DiameterResult(lower=lower, upper=upper,
                          method="double-sweep-bound", witness=witness)


@dataclass
class TypicalDistanceResult:
    mean: float
    median: float
    max: int
    n_connected: int
    n_disconnected: int
    samples: np.ndarray


def typical_distance(graph: PAGraph, n_pairs: int, seed: int) -> TypicalDistanceResult:
    """dist(V1, V2) for n_pairs iid uniform vertex pairs.

    V1 = V2 is allowed (distance 0).  Pairs in different components are
    skipped and counted in n_disconnected; statistics cover the
    connected sample only.
    """
    if n_pairs < 1:
        raise ValueError("n_pairs must be >= 1")
    rng = random.Random(seed)
    adj = adjacency(graph)
    out = []
    skipped = 0
    for _ in range(n_pairs):
        v1 = 1 + randbelow(rng, graph.t)
        v2 = 1 + randbelow(rng, graph.t)
        d = int(_bfs_dist(adj, v1, until=v2)[v2])
        if d < 0:
            skipped += 1
        else:
            out.append(d)
    samples = np.array(out, dtype=np.int64)
    if samples.size == 0:
        return TypicalDistanceResult(math.nan, math.nan, -1, 0, skipped, samples)
    return TypicalDistanceResult(mean=float(samples.mean()),
                                 median=float(np.median(samples)),
                                 max=int(samples.max()),
                                 n_connected=int(samples.size),
                                 n_disconnected=skipped,
                                 samples=samples)


def degree_histogram(graph: PAGraph) -> np.ndarray:
    """counts[k] = N_k(t) = #{i <= t : D_i(t) = k}; index 0 included."""
    return np.bincount(graph.degrees[1:])


def n_geq(graph: PAGraph, l) -> int:
    """N_{>=l}(t); l may be real (degree thresholds u_k usually are)."""
    return int(np.count_nonzero(graph.degrees[1:] >= l))
