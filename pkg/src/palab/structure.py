"""High-degree cores, layer hierarchies, connectors, and exploration trees.

The objects here are deterministic functions of a frozen graph: the
core of high-degree vertices, the nested layers interpolating between
the inner core and the core, two-step connectors through late vertices,
and the out-edge exploration trees whose collision-free count Z feeds
the doubly-logarithmic distance analysis.
"""

from __future__ import annotations

import csv
import json
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .graph import PAGraph, is_bundle
from .params import PAParams
from . import theory


# -- core ----------------------------------------------------------------------


@dataclass
class CoreSpec:
    sigma: float
    threshold: float            # (ln t)^sigma
    members: np.ndarray         # sorted vertex ids with degree >= threshold

    @property
    def size(self) -> int:
        return int(self.members.size)

    def __contains__(self, v) -> bool:
        i = np.searchsorted(self.members, v)
        return i < self.members.size and self.members[i] == v


def core(graph: PAGraph, sigma: float) -> CoreSpec:
    """Vertices whose final degree is at least (ln t)^sigma."""
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    tau = graph.params.tau
    if tau < 3 and sigma <= 1.0 / (3.0 - tau):
        warnings.warn(f"sigma={sigma} <= 1/(3-tau)={1.0 / (3.0 - tau):.4g}; "
                      "core guarantees need a larger sigma", stacklevel=2)
    thr = math.log(graph.t) ** sigma if graph.t > 1 else 0.0
    members = np.flatnonzero(graph.degrees >= thr)
    members = members[members >= 1]
    return CoreSpec(sigma=sigma, threshold=thr, members=members.astype(np.int64))


# -- layers --------------------------------------------------------------------


def layer_thresholds(tau: float, t: int, D: float = 1.0, k_max: int | None = None):
    """Degree thresholds u_1 >= u_2 >= ... by recursion and closed form.

    u_1 = t^{1/(2(tau-1))} / sqrt(ln t) and u_k = D ln t u_{k-1}^{tau-2};
    the closed form is u_k = D^{a_k} (ln t)^{b_k} t^{c_k} with
    a_k = (1-(tau-2)^{k-1})/(3-tau), b_k = a_k - (tau-2)^{k-1}/2,
    c_k = (tau-2)^{k-1}/(2(tau-1)).  Returns (recursion, closed_form).
    """
    if not 2.0 < tau < 3.0:
        raise ValueError("layer hierarchy needs tau in (2,3)")
    if D <= 0:
        raise ValueError("D must be positive")
    if t < 3:
        raise ValueError("t too small for log-based thresholds")
    if k_max is None:
        k_max = max(1, math.floor(math.log(math.log(t)) / abs(math.log(tau - 2))))
    lt = math.log(t)
    u_rec = np.empty(k_max)
    u_rec[0] = t ** (1.0 / (2.0 * (tau - 1.0))) / math.sqrt(lt)
    for k in range(1, k_max):
        u_rec[k] = D * lt * u_rec[k - 1] ** (tau - 2.0)
    u_closed = np.empty(k_max)
    for k in range(1, k_max + 1):
        r = (tau - 2.0) ** (k - 1)
        a_k = (1.0 - r) / (3.0 - tau)
        b_k = a_k - 0.5 * r
        c_k = r / (2.0 * (tau - 1.0))
        u_closed[k - 1] = D ** a_k * lt ** b_k * t ** c_k
    return u_rec, u_closed


@dataclass
class LayerHierarchy:
    t: int
    tau: float
    D: float
    sigma: float
    k_star: int
    u: np.ndarray          # recursion values, index k-1
    u_closed: np.ndarray   # closed-form values
    sizes: np.ndarray      # |{i: D_i(t) >= u_k}|
    core_threshold: float
    _degrees: np.ndarray = field(repr=False, default=None)

    def members(self, k: int) -> np.ndarray:
        """Vertices of layer k (1-based), computed from the recursion value."""
        if not 1 <= k <= len(self.u):
            raise IndexError("layer index out of range")
        out = np.flatnonzero(self._degrees >= self.u[k - 1])
        return out[out >= 1]


def layers(graph: PAGraph, sigma: float, D: float = 1.0,
           k_max: int | None = None) -> LayerHierarchy:
    """Nested degree layers from the inner core down to the core scale."""
    p = graph.params
    tau = p.tau
    if tau >= 3.0:
        raise ValueError("layers need tau < 3 (negative delta)")
    t = graph.t
    ks = theory.k_star(p, t)
    if k_max is None:
        k_max = ks
    u_rec, u_closed = layer_thresholds(tau, t, D, k_max)
    deg = graph.degrees
    sizes = np.array([int(np.count_nonzero(deg[1:] >= u)) for u in u_rec])
    return LayerHierarchy(t=t, tau=tau, D=D, sigma=sigma, k_star=ks,
                          u=u_rec, u_closed=u_closed, sizes=sizes,
                          core_threshold=math.log(t) ** sigma,
                          _degrees=deg)


# -- connectors ----------------------------------------------------------------


def t_connectors(graph: PAGraph, i: int, A) -> list[int]:
    """Late vertices whose first two edges join i to the set A.

    The graph must be grown to an even time 2t; candidates j run over
    (t, 2t] and qualify when {g(j,1), g(j,2)} contains i and meets A.
    Such a j certifies distance(i, A) <= 2.
    """
    p = graph.params
    if p.m < 2:
        raise ValueError("connectors need m >= 2 (two distinct first edges)")
    t2 = graph.t
    if t2 % 2:
        raise ValueError("graph must be grown to an even horizon 2t")
    t = t2 // 2
    if not 1 <= i <= t:
        raise ValueError("i must lie in [t]")
    A = np.asarray(sorted(set(int(x) for x in A)), dtype=np.int64)
    if A.size and (A[0] < 1 or A[-1] > t):
        raise ValueError("A must be a subset of [t]")
    if A.size and np.searchsorted(A, i) < A.size and A[np.searchsorted(A, i)] == i:
        raise ValueError("i must not belong to A")
    if not A.size:
        return []
    rows = graph.targets.reshape(t2, p.m)[t:t2, :2].astype(np.int64)
    e1, e2 = rows[:, 0], rows[:, 1]
    hit_i = (e1 == i) | (e2 == i)
    hit_a = np.isin(e1, A) | np.isin(e2, A)
    return [int(j) for j in t + 1 + np.flatnonzero(hit_i & hit_a)]


# -- exploration trees ---------------------------------------------------------


@dataclass
class ExplorationTree:
    root: int
    k: int
    levels: list                  # levels[l] = vertices discovered at depth l
    collisions: int
    collision_events: list        # (parent, edge_index, target, level_of_target)
    hit_core: bool                # some tree vertex lies in the stop set
    all_in_upper_half: bool
    no_external_inedges: bool

    @property
    def vertices(self) -> set:
        return {v for lvl in self.levels for v in lvl}

    @property
    def size(self) -> int:
        return sum(len(lvl) for lvl in self.levels)


def _out_targets(graph: PAGraph, v: int):
    """Semantic out-edge targets of v (bundle rows at v in {1,2} join 1<->2)."""
    m = graph.params.m
    base = m * (v - 1)
    raw = graph.targets[base:base + m]
    if is_bundle(graph.params) and v == 1:
        return [2] * m
    return [int(x) for x in raw]


def exploration_tree(graph: PAGraph, root: int, k: int, stop_set=frozenset()) -> ExplorationTree:
    """Depth-k BFS over each vertex's m birth-edge targets.

    Vertices in stop_set are kept in the tree but not expanded.  An
    edge to a vertex already present is a collision; a self-loop row
    (possible in variant a) expands nothing and is not a collision.
    """
    if not 1 <= root <= graph.t:
        raise ValueError("root outside graph")
    if k < 0:
        raise ValueError("k must be >= 0")
    stop = stop_set if isinstance(stop_set, (set, frozenset)) else set(stop_set)
    levels = [[root]]
    present = {root}
    collisions = 0
    events = []
    for level in range(k):
        nxt = []
        for v in levels[level]:
            if v in stop:
                continue
            for j, tgt in enumerate(_out_targets(graph, v), start=1):
                if tgt == v:
                    continue  # non-expanding loop row
                if tgt in present:
                    collisions += 1
                    events.append((v, j, tgt, level + 1))
                else:
                    present.add(tgt)
                    nxt.append(tgt)
        levels.append(nxt)
    half = graph.t // 2
    verts = present
    hit_core = any(v in stop for v in verts)
    all_upper = all(v > half for v in verts)
    external = _has_external_inedge(graph, verts)
    return ExplorationTree(root=root, k=k, levels=levels, collisions=collisions,
                           collision_events=events, hit_core=hit_core,
                           all_in_upper_half=all_upper,
                           no_external_inedges=not external)


def _has_external_inedge(graph: PAGraph, verts: set) -> bool:
    for u in verts:
        for v, _j in graph.in_neighbors(u):
            if v not in verts:
                return True
    # the initial parallel pair is recorded under vertex 1's rows only
    if is_bundle(graph.params) and 2 in verts and 1 not in verts:
        return True
    return False


def m_tree_size(m: int, k: int) -> int:
    """Vertices of a full collision-free tree: 1 + m + ... + m^k."""
    if m == 1:
        return k + 1
    return (m ** (k + 1) - 1) // (m - 1)


def count_proper_trees(graph: PAGraph, k: int) -> int:
    """Z: roots in the late half whose depth-k trees are proper.

    Proper: no collisions, every vertex in (t, 2t], full size
    (m^{k+1}-1)/(m-1), and no vertex outside the tree targets a tree
    vertex.  Needs m >= 2 and an even horizon 2t.
    """
    p = graph.params
    if p.m < 2:
        raise ValueError("proper-tree counting needs m >= 2")
    if graph.t % 2:
        raise ValueError("graph must be grown to an even horizon 2t")
    t = graph.t // 2
    want = m_tree_size(p.m, k)
    z = 0
    for root in range(t + 1, graph.t + 1):
        tr = exploration_tree(graph, root, k)
        if (tr.collisions == 0 and tr.size == want
                and tr.all_in_upper_half and tr.no_external_inedges):
            z += 1
    return z


def early_cutoff(params: PAParams, t: int, b: float | None = None) -> int:
    """Size of the early-vertex set [t^b]; b defaults to (m+d)/(2(3m+2d))."""
    if b is None:
        b = 0.5 * (params.m + params.delta_float) / (3 * params.m + 2 * params.delta_float)
    if not 0 < b < 1:
        raise ValueError("b must lie in (0,1)")
    return int(t ** b)


# -- reports -------------------------------------------------------------------


def export_tree_report(graph: PAGraph, k: int, path, stop_set=frozenset(),
                       roots=None) -> int:
    """Per-root CSV: root, size, collisions, hit_core, proper.

    Default roots are the late half (t/2, t].  Returns the row count.
    """
    if roots is None:
        roots = range(graph.t // 2 + 1, graph.t + 1)
    want = m_tree_size(graph.params.m, k)
    n = 0
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["root", "size", "collisions", "hit_core", "proper"])
        for root in roots:
            tr = exploration_tree(graph, root, k, stop_set)
            proper = (tr.collisions == 0 and tr.size == want
                      and tr.all_in_upper_half and tr.no_external_inedges)
            w.writerow([root, tr.size, tr.collisions, int(tr.hit_core), int(proper)])
            n += 1
    return n


def export_structure_summary(graph: PAGraph, sigma: float, path, D: float = 1.0,
                             k: int = 1) -> dict:
    """JSON summary: core size, layer sizes, and Z when defined."""
    cr = core(graph, sigma)
    out = {
        "t": graph.t,
        "model": graph.params.variant,
        "m": graph.params.m,
        "delta": str(graph.params.delta),
        "sigma": sigma,
        "core_threshold": cr.threshold,
        "core_size": cr.size,
    }
    if graph.params.tau < 3:
        ly = layers(graph, sigma, D)
        out["k_star"] = ly.k_star
        out["u"] = [float(x) for x in ly.u]
        out["u_closed"] = [float(x) for x in ly.u_closed]
        out["layer_sizes"] = [int(x) for x in ly.sizes]
    if graph.params.m >= 2 and graph.t % 2 == 0:
        out["k"] = k
        out["Z"] = count_proper_trees(graph, k)
    with open(path, "w") as fh:
        json.dump(out, fh, indent=2)
    return out
