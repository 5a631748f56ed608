"""Frozen preferential-attachment graph backed by the attachment-event log.

The log is the single source of truth.  Entry m*(v-1)+j-1 (0-based)
holds g(v, j), the target of the j-th edge of vertex v, 1-based.  The
initial edges are stored as explicit rows for v in {1, 2} so a file is
self-contained:

* variant "a" (and collapsed "a"/"b" with m > 1): a row with
  target == child is a self-loop and contributes 2 to that vertex's
  degree.
* variant "c" and variant "b" at m = 1 ("bundle" graphs): the m rows
  of vertex 1 carry target 1 but stand for the initial parallel edges
  {1, 2}; each contributes 1 to D_1 and 1 to D_2.  No other row of a
  bundle graph can have target == child (growth never offers the child
  as a candidate).

Degrees, adjacency, and historical degrees are all derived from the
log and cross-checked against the stored degree array on load.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .params import PAParams

FORMAT_VERSION = "1"


def is_bundle(params: PAParams) -> bool:
    """True when the initial rows of vertex 1 are parallel-edge halves."""
    return params.variant == "c" or (params.variant == "b" and params.m == 1)


@dataclass(eq=False)
class PAGraph:
    """Immutable grown graph: parameters, final time, event log, degrees."""

    params: PAParams
    t: int
    targets: np.ndarray  # int32, length m*t, entry m(v-1)+j-1 = g(v,j)
    degrees: np.ndarray  # int64, length t+1, 1-based ([0] unused = 0)
    seed: int | None = None
    rng_name: str = "mt19937"
    format_version: str = FORMAT_VERSION
    _in_order: np.ndarray | None = field(default=None, repr=False, compare=False)
    _in_starts: np.ndarray | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        self.targets = np.asarray(self.targets, dtype=np.int32)
        self.degrees = np.asarray(self.degrees, dtype=np.int64)
        m, t = self.params.m, self.t
        if len(self.targets) != m * t:
            raise ValueError(f"event log has {len(self.targets)} rows, expected m*t={m * t}")
        if len(self.degrees) != t + 1:
            raise ValueError("degree array must have length t+1 (1-based)")
        self.targets.setflags(write=False)
        self.degrees.setflags(write=False)

    # -- basic views --------------------------------------------------------

    @property
    def m(self) -> int:
        return self.params.m

    @property
    def n_edges(self) -> int:
        return len(self.targets)

    @property
    def bundle(self) -> bool:
        return is_bundle(self.params)

    def children(self) -> np.ndarray:
        """child vertex of each log entry: entry e belongs to vertex 1+e//m."""
        return (np.arange(self.n_edges, dtype=np.int64) // self.m + 1).astype(np.int32)

    def selfloop_mask(self) -> np.ndarray:
        """Entries that are true self-loops (never any in bundle graphs)."""
        if self.bundle:
            return np.zeros(self.n_edges, dtype=bool)
        return self.targets == self.children()

    def target(self, v: int, j: int) -> int:
        """g(v, j), 1-based in both arguments."""
        if not (1 <= v <= self.t and 1 <= j <= self.m):
            raise IndexError(f"(v={v}, j={j}) out of range")
        return int(self.targets[self.m * (v - 1) + (j - 1)])

    # -- degrees -------------------------------------------------------------

    def reconstruct_degrees(self) -> np.ndarray:
        """Recompute D_i(t) from the log alone; must equal self.degrees."""
        m, t = self.m, self.t
        deg = np.bincount(self.targets, minlength=t + 1).astype(np.int64)
        deg += np.bincount(self.children(), minlength=t + 1)
        if self.bundle:
            # vertex 1's rows are edges {1,2}: move their target end to 2
            deg[1] -= m
            deg[2] += m
        return deg

    def degree_at(self, i: int, s: int) -> int:
        """D_i(s) for any historical time s, from the event log.

        Bundle graphs start at t=2, so s >= 2 there; variant "a" (and
        the collapsed graphs, which begin at t=1) allow s >= 1.
        """
        t0 = 2 if self.bundle else 1
        if not (1 <= i <= s <= self.t) or s < t0:
            raise IndexError(f"need {t0} <= s <= t and i <= s, got i={i}, s={s}")
        e = self.in_entries(i)
        c = e // self.m + 1  # children; c >= i always since g(v,j) <= v
        if self.bundle:
            cnt = int(np.count_nonzero((c <= s) & (c != i)))
            extra = self.m if i == 2 else 0
        else:
            cnt = int(np.count_nonzero(c <= s))  # c == i rows are self-loops
            extra = 0
        return self.m + cnt + extra

    # -- inverted index ------------------------------------------------------

    def _build_index(self):
        order = np.argsort(self.targets, kind="stable").astype(np.int64)
        # starts[k] = first position in the sorted targets with value >= k+1
        starts = np.searchsorted(self.targets[order], np.arange(1, self.t + 2))
        self._in_order = order
        self._in_starts = starts

    def in_entries(self, i: int) -> np.ndarray:
        """0-based log indices of all rows with target i, ascending."""
        if self._in_order is None:
            self._build_index()
        return self._in_order[self._in_starts[i - 1]:self._in_starts[i]]

    def in_neighbors(self, i: int) -> list[tuple[int, int]]:
        """All (v, j) with g(v, j) = i and v > i, in edge order.

        Self-loop rows and the bundle rows of vertex 1 have v == target
        and are excluded; they are degree bookkeeping, not in-edges.
        """
        if not (1 <= i <= self.t):
            raise IndexError(f"vertex {i} out of range")
        e = self.in_entries(i)
        v = e // self.m + 1
        keep = e[v > i]
        return [(int(x) // self.m + 1, int(x) % self.m + 1) for x in keep]

    # -- serialization -------------------------------------------------------

    def _checksum(self) -> str:
        return hashlib.sha256(np.ascontiguousarray(self.targets, dtype="<i4").tobytes()).hexdigest()

    def save(self, path):
        """Text format: `# key=value` header, then `edge_index child target` rows."""
        header = [
            f"# format_version={self.format_version}",
            f"# model={self.params.variant}",
            f"# m={self.params.m}",
            f"# delta={self.params.delta}",
            f"# t={self.t}",
            f"# seed={self.seed if self.seed is not None else ''}",
            f"# rng={self.rng_name}",
            f"# checksum={self._checksum()}",
        ]
        idx = np.arange(1, self.n_edges + 1, dtype=np.int64)
        rows = np.column_stack([idx, self.children().astype(np.int64), self.targets.astype(np.int64)])
        with open(path, "w") as fh:
            fh.write("\n".join(header) + "\n")
            np.savetxt(fh, rows, fmt="%d")

    def validate(self):
        """Cross-check degrees and log invariants; raises on any mismatch."""
        rec = self.reconstruct_degrees()
        if not np.array_equal(rec, self.degrees):
            bad = int(np.flatnonzero(rec != self.degrees)[0])
            raise ValueError(f"degree mismatch at vertex {bad}: log says {rec[bad]}, stored {self.degrees[bad]}")
        c = self.children()
        if np.any(self.targets < 1) or np.any(self.targets > c):
            raise ValueError("event log has g(v,j) outside [1, v]")
        if self.bundle:
            eq = self.targets == c
            eq[: self.m] = False  # vertex 1's bundle rows
            if np.any(eq):
                raise ValueError("bundle graph has a self-loop row past vertex 1")
        if int(self.degrees.sum()) != 2 * self.n_edges:
            raise ValueError("degree sum != 2 * edge count")

    @classmethod
    def load(cls, path) -> "PAGraph":
        meta = {}
        with open(path) as fh:
            pos = fh.tell()
            line = fh.readline()
            while line.startswith("#"):
                key, _, val = line[1:].strip().partition("=")
                meta[key.strip()] = val.strip()
                pos = fh.tell()
                line = fh.readline()
            fh.seek(pos)
            body = np.loadtxt(fh, dtype=np.int64, ndmin=2)
        if meta.get("format_version") != FORMAT_VERSION:
            raise ValueError(f"unsupported format_version {meta.get('format_version')!r}")
        params = PAParams(meta["model"], int(meta["m"]), Fraction(meta["delta"]))
        t = int(meta["t"])
        if body.shape[0] != params.m * t:
            raise ValueError(f"file has {body.shape[0]} edges, header says {params.m * t}")
        if body.shape[0] and not np.array_equal(body[:, 0], np.arange(1, body.shape[0] + 1)):
            raise ValueError("edge_index column is not 1..mt in order")
        targets = body[:, 2].astype(np.int32)
        expect_child = np.arange(body.shape[0], dtype=np.int64) // params.m + 1
        if not np.array_equal(body[:, 1], expect_child):
            raise ValueError("child column inconsistent with edge_index and m")
        seed = int(meta["seed"]) if meta.get("seed") else None
        g = cls(params=params, t=t, targets=targets,
                degrees=_degrees_from_log(params, t, targets),
                seed=seed, rng_name=meta.get("rng", "unknown"))
        if "checksum" in meta and meta["checksum"] != g._checksum():
            raise ValueError("checksum mismatch: file corrupted")
        g.validate()
        return g


def _degrees_from_log(params: PAParams, t: int, targets: np.ndarray) -> np.ndarray:
    m = params.m
    deg = np.bincount(targets, minlength=t + 1).astype(np.int64)
    deg += np.bincount(np.arange(len(targets), dtype=np.int64) // m + 1, minlength=t + 1)
    if is_bundle(params):
        deg[1] -= m
        deg[2] += m
    return deg


def export_degree_histogram(graph: PAGraph, path):
    """CSV with columns k,count: number of vertices of each degree k >= 1."""
    counts = np.bincount(graph.degrees[1:])
    with open(path, "w") as fh:
        fh.write("k,count\n")
        for k in range(1, len(counts)):
            if counts[k]:
                fh.write(f"{k},{counts[k]}\n")
