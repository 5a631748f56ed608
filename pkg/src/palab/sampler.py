"""Exact attachment-target sampling.

Draws a vertex with probability proportional to D_i + delta in O(1)
expected time, for delta of either sign, with no floating-point error
in the realized law.  delta = p/q is handled in integer arithmetic:

* delta >= 0: mixture.  Total weight q*sum(D) + p*n splits into a
  uniform-vertex part (mass p per vertex) and a uniform-half-edge part
  (mass q per degree unit).  One integer draw picks the part and the
  item.
* delta < 0: rejection.  Propose a uniform half-edge endpoint i
  (probability D_i / sum D), accept with probability
  (q*D_i + p) / (q*D_i).  Expected number of proposals is
  sum(D) / sum(D + delta), at most 2m/(2m+delta) during growth.

The growth kernels in :mod:`palab.growth` inline these loops for
speed; this module is the reference surface, and the test suite checks
the two against each other draw for draw.
"""

from __future__ import annotations

from fractions import Fraction

from .params import DeltaLike, as_fraction


def randbelow(rng, n: int) -> int:
    """Exactly uniform integer in [0, n) from a getrandbits source.

    Rejection on the top power of two; never biased, unlike int(n *
    rng.random()).
    """
    if n <= 0:
        raise ValueError(f"randbelow needs n >= 1, got {n}")
    k = (n - 1).bit_length()
    r = rng.getrandbits(k)
    while r >= n:
        r = rng.getrandbits(k)
    return r


class AttachmentSampler:
    """Half-edge endpoint list with exact proportional-to-(D+delta) draws.

    Vertices are 1-based.  Every edge append pushes both endpoints; the
    endpoint list length therefore always equals sum(D_i).
    """

    def __init__(self, delta: DeltaLike, degrees=()):
        d = as_fraction(delta)
        self._p = d.numerator
        self._q = d.denominator
        self.delta = d
        self._deg = [0]  # 1-based; slot 0 unused
        self.ends = []
        self.trials = 0  # cumulative rejection proposals, for diagnostics
        self._checked = True
        for i, di in enumerate(degrees, start=1):
            self._deg.append(int(di))
            self.ends.extend([i] * int(di))
        if degrees:
            self._checked = False

    @property
    def n(self) -> int:
        return len(self._deg) - 1

    @property
    def total_weight(self) -> Fraction:
        """sum(D_i + delta), exact."""
        return len(self.ends) + self.delta * self.n

    def add_edge(self, u: int, v: int):
        """Append edge {u, v}; grows the vertex set to cover max(u, v)."""
        hi = max(u, v)
        if min(u, v) < 1:
            raise ValueError("vertex indices are 1-based")
        while len(self._deg) <= hi:
            self._deg.append(0)
        self._deg[u] += 1
        self._deg[v] += 1
        self.ends.append(u)
        self.ends.append(v)
        self._checked = False

    def degree(self, i: int) -> int:
        return self._deg[i]

    def _validate(self):
        # all weights q*D_i + p must be positive or the law is undefined
        if self.n == 0:
            raise ValueError("no vertices to sample")
        if self._p < 0 and min(self._deg[1:]) * self._q + self._p <= 0:
            raise ValueError(f"some weight D_i + {self.delta} <= 0")
        self._checked = True

    def sample(self, rng) -> int:
        """Vertex i with probability exactly (D_i + delta) / total_weight."""
        if not self._checked:
            self._validate()
        p, q, ends = self._p, self._q, self.ends
        if p >= 0:
            w = q * len(ends) + p * self.n
            if w <= 0:
                raise ValueError("total weight is zero")
            r = randbelow(rng, w)
            if r < p * self.n:
                return 1 + r // p
            return ends[(r - p * self.n) // q]
        deg = self._deg
        while True:
            self.trials += 1
            i = ends[randbelow(rng, len(ends))]
            qd = q * deg[i]
            if randbelow(rng, qd) < qd + p:
                return i
