"""Exhaustive distribution of the growth process for tiny horizons.

Every possible event log up to time T is enumerated with its exact
probability (rationals; delta is always a Fraction), giving an oracle
for process marginals, joint attachment events, negative-correlation
sweeps, exact degree laws, and the exact diameter law on at most a few
thousand outcomes.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .graph import PAGraph, _degrees_from_log
from .params import PAParams

DEFAULT_BUDGET = 10 ** 7


def _outcome_budget(params: PAParams, T: int) -> int:
    """Upper bound on the number of enumerated logs (before pruning)."""
    if params.variant == "a":
        n = 1
        for t in range(1, T):
            n *= t + 1
        return n
    n = 1
    for t in range(2, T):
        n *= t ** params.m
    return n


@dataclass
class ExactDistribution:
    params: PAParams
    T: int
    outcomes: np.ndarray            # (n, m*T) int16 event logs
    probs: list                     # exact Fraction per outcome
    probs_f: np.ndarray             # float view of probs
    _masks: dict = field(default_factory=dict, repr=False)

    @property
    def n_outcomes(self) -> int:
        return self.outcomes.shape[0]

    @property
    def random_slots(self) -> list[int]:
        """0-based log indices whose targets are drawn, not forced."""
        first = 1 if self.params.variant == "a" else 2 * self.params.m
        return list(range(first, self.params.m * self.T))

    def slot_child(self, slot: int) -> int:
        return slot // self.params.m + 1

    def slot_support(self, slot: int) -> range:
        """Targets that are syntactically possible for this slot."""
        v = self.slot_child(slot)
        return range(1, v + 1) if self.params.variant == "a" else range(1, v)

    def total_mass(self) -> Fraction:
        return sum(self.probs, Fraction(0))

    def mask(self, slot: int, target: int) -> np.ndarray:
        key = (slot, target)
        cached = self._masks.get(key)
        if cached is None:
            cached = self.outcomes[:, slot] == target
            self._masks[key] = cached
        return cached

    def _prob_of_mask(self, mask: np.ndarray) -> Fraction:
        idx = np.flatnonzero(mask)
        return sum((self.probs[i] for i in idx), Fraction(0))

    def event_prob(self, events) -> Fraction:
        """P(AND of {g(v,j) = s}); events is an iterable of (v, j, s).

        Conflicting constraints on one slot give probability 0.
        """
        m = self.params.m
        wanted = {}
        for v, j, s in events:
            slot = m * (v - 1) + (j - 1)
            if not (0 <= slot < m * self.T):
                raise IndexError(f"slot (v={v}, j={j}) outside horizon")
            if slot in wanted and wanted[slot] != s:
                return Fraction(0)
            wanted[slot] = s
        if not wanted:
            return Fraction(1)
        mask = np.ones(self.n_outcomes, dtype=bool)
        for slot, s in wanted.items():
            mask &= self.mask(slot, s)
        return self._prob_of_mask(mask)

    def marginal(self, slot: int) -> dict[int, Fraction]:
        """Exact pmf of the target in one log slot."""
        out = {}
        for s in self.slot_support(slot):
            p = self._prob_of_mask(self.mask(slot, s))
            if p:
                out[s] = p
        return out

    def to_graph(self, idx: int) -> PAGraph:
        targets = self.outcomes[idx].astype(np.int32)
        return PAGraph(params=self.params, t=self.T, targets=targets,
                       degrees=_degrees_from_log(self.params, self.T, targets),
                       seed=None, rng_name="exact")

    def dump_json(self, path):
        rows = [{"targets": [int(x) for x in self.outcomes[i]],
                 "prob": str(self.probs[i])} for i in range(self.n_outcomes)]
        with open(path, "w") as fh:
            json.dump({"variant": self.params.variant, "m": self.params.m,
                       "delta": str(self.params.delta), "T": self.T,
                       "outcomes": rows}, fh)


def enumerate_process(params: PAParams, T: int, budget: int = DEFAULT_BUDGET) -> ExactDistribution:
    """All attainable event logs at horizon T with exact probabilities.

    Zero-weight branches (possible when delta < 0 makes D + delta
    vanish) are pruned, so the stored outcomes have positive mass and
    they sum to exactly 1.
    """
    if params.variant in ("a", "b") and params.m > 1:
        raise ValueError("enumeration supports variants a/b at m=1 and variant c")
    t_min = 1 if params.variant == "a" else 2
    if T < t_min:
        raise ValueError(f"T must be >= {t_min}")
    if _outcome_budget(params, T) > budget:
        raise ValueError(f"outcome budget exceeded: {_outcome_budget(params, T)} > {budget}")
    m, delta = params.m, params.delta
    variant = params.variant
    mt = m * T
    outcomes: list[tuple] = []
    probs: list[Fraction] = []

    if variant == "a":
        deg = [0, 2] + [0] * (T - 1)
        log = [1] + [0] * (mt - 1)
        t0 = 1
    else:
        deg = [0, 2 * m, 2 * m] + [0] * (T - 2)
        log = [1] * (2 * m) + [0] * (mt - 2 * m)
        t0 = 2

    def rec(t, prob):
        if t == T:
            outcomes.append(tuple(log))
            probs.append(prob)
            return
        if variant == "a":
            total = (2 + delta) * t + (1 + delta)
            for tgt in range(1, t + 2):
                w = (deg[tgt] + delta) if tgt <= t else (1 + delta)
                if w == 0:
                    continue
                log[t] = tgt
                if tgt == t + 1:
                    deg[tgt] += 2
                else:
                    deg[tgt] += 1
                    deg[t + 1] += 1
                rec(t + 1, prob * w / total)
                if tgt == t + 1:
                    deg[tgt] -= 2
                else:
                    deg[tgt] -= 1
                    deg[t + 1] -= 1
            log[t] = 0
            return
        # variants b (m=1) and c: m frozen draws among [t]
        total = (2 * m + delta) * t
        weights = [deg[i] + delta for i in range(1, t + 1)]
        base = m * t
        for tup in itertools.product(range(1, t + 1), repeat=m):
            p = prob
            ok = True
            for tgt in tup:
                w = weights[tgt - 1]
                if w == 0:
                    ok = False
                    break
                p = p * w / total
            if not ok:
                continue
            for j, tgt in enumerate(tup):
                log[base + j] = tgt
                deg[tgt] += 1
            deg[t + 1] += m
            rec(t + 1, p)
            deg[t + 1] -= m
            for j, tgt in enumerate(tup):
                log[base + j] = 0
                deg[tgt] -= 1

    rec(t0, Fraction(1))
    arr = np.array(outcomes, dtype=np.int16)
    dist = ExactDistribution(params=params, T=T, outcomes=arr, probs=probs,
                             probs_f=np.array([float(p) for p in probs]))
    if dist.total_mass() != 1:
        raise AssertionError(f"enumerated mass {dist.total_mass()} != 1")
    return dist


# -- negative correlation ------------------------------------------------------


@dataclass
class NegCorrReport:
    n_families: int
    n_checked: int
    n_violations: int
    tightest_ratio: float        # max joint/product over all families (1 at k=1)
    tightest_ratio_multi: float  # same, restricted to >= 2 groups
    worst_family: tuple | None
    max_excess: float  # max of P(joint) - prod P(group), exact sign

    @property
    def passed(self) -> bool:
        return self.n_violations == 0


def verify_negative_correlation(dist: ExactDistribution, max_groups: int = 3,
                                max_events_per_vertex: int = 2) -> NegCorrReport:
    """Exhaustively check P(AND E_{s_i}) <= prod P(E_{s_i}).

    Families: up to max_groups groups with pairwise-disjoint slot sets
    (at most max_events_per_vertex slots each) and pairwise-distinct
    targets.  Groups whose own probability is 0 are skipped (the
    inequality is vacuous there).  Slack 1e-12; probabilities exact.
    """
    slots = dist.random_slots
    groups = []
    for size in range(1, max_events_per_vertex + 1):
        groups.extend(itertools.combinations(slots, size))
    group_prob: dict = {}

    def gp(g, s) -> Fraction:
        key = (g, s)
        p = group_prob.get(key)
        if p is None:
            mask = dist.mask(g[0], s)
            for slot in g[1:]:
                mask = mask & dist.mask(slot, s)
            p = dist._prob_of_mask(mask)
            group_prob[key] = p
        return p

    def supports(g):
        hi = min(dist.slot_child(slot) for slot in g)
        if dist.params.variant != "a":
            hi -= 1
        return range(1, hi + 1)

    n_fam = n_checked = n_viol = 0
    tightest = 0.0
    tightest_multi = 0.0
    worst = None
    max_excess = -1.0

    def rec(start, chosen):
        nonlocal n_fam, n_checked, n_viol, tightest, tightest_multi, worst, max_excess
        k = len(chosen)
        if k >= 1:  # single groups are exact equalities, kept for the ratio-1 anchor
            # assign pairwise-distinct targets to the chosen groups
            for targets in itertools.product(*(supports(g) for g in chosen)):
                if len(set(targets)) != k:
                    continue
                n_fam += 1
                margs = [gp(g, s) for g, s in zip(chosen, targets)]
                if any(p == 0 for p in margs):
                    continue
                n_checked += 1
                mask = None
                for g, s in zip(chosen, targets):
                    for slot in g:
                        mk = dist.mask(slot, s)
                        mask = mk if mask is None else (mask & mk)
                joint = dist._prob_of_mask(mask)
                rhs = Fraction(1)
                for p in margs:
                    rhs *= p
                excess = joint - rhs
                if float(excess) > max_excess:
                    max_excess = float(excess)
                ratio = float(joint / rhs)
                if ratio > tightest:
                    tightest = ratio
                if k >= 2 and ratio > tightest_multi:
                    tightest_multi = ratio
                    worst = (tuple(chosen), targets)
                if excess > Fraction(1, 10 ** 12):
                    n_viol += 1
        if k == max_groups:
            return
        for gi in range(start, len(groups)):
            g = groups[gi]
            if any(set(g) & set(prev) for prev in chosen):
                continue
            chosen.append(g)
            rec(gi + 1, chosen)
            chosen.pop()

    rec(0, [])
    return NegCorrReport(n_families=n_fam, n_checked=n_checked, n_violations=n_viol,
                         tightest_ratio=tightest, tightest_ratio_multi=tightest_multi,
                         worst_family=worst, max_excess=max_excess)


# -- connection probability constants -----------------------------------------


@dataclass
class ConnectionBoundsReport:
    m1: float
    m1_witness: tuple  # (v, j, s)
    m2: float
    m2_witness: tuple | None  # (v1, j1, v2, j2, s)
    a: float


def verify_connection_bounds(dist: ExactDistribution) -> ConnectionBoundsReport:
    """Empirical minimal constants for the attachment-probability decay.

    m1 = max P(g(v,j)=s) * v^{1-a} * s^a over slots and targets s < v;
    m2 = the pairwise analogue over v2 > v1 > s with both targets s.
    """
    a = dist.params.a
    m = dist.params.m
    m1, m1_wit = 0.0, None
    for slot in dist.random_slots:
        v = dist.slot_child(slot)
        j = slot % m + 1
        for s, p in dist.marginal(slot).items():
            if s >= v:
                continue  # variant-a self-loop rows are outside this bound
            val = float(p) * v ** (1 - a) * s ** a
            if val > m1:
                m1, m1_wit = val, (v, j, s)
    m2, m2_wit = 0.0, None
    rs = dist.random_slots
    for i1 in range(len(rs)):
        for i2 in range(i1 + 1, len(rs)):
            s1, s2 = rs[i1], rs[i2]
            v1, v2 = dist.slot_child(s1), dist.slot_child(s2)
            if v2 <= v1:
                continue
            for s in range(1, v1):
                p = dist.event_prob([(v1, s1 % m + 1, s), (v2, s2 % m + 1, s)])
                if p == 0:
                    continue
                val = float(p) * (v1 * v2) ** (1 - a) * s ** (2 * a)
                if val > m2:
                    m2, m2_wit = val, (v1, s1 % m + 1, v2, s2 % m + 1, s)
    return ConnectionBoundsReport(m1=m1, m1_witness=m1_wit, m2=m2, m2_witness=m2_wit, a=a)


# -- exact marginals of graph functionals --------------------------------------


def exact_degree_pmf(dist: ExactDistribution, i: int, T: int | None = None) -> dict[int, Fraction]:
    """Exact law of D_i(T) under the enumerated process (T <= horizon)."""
    if T is None:
        T = dist.T
    t0 = 2 if dist.params.variant in ("b", "c") else 1
    if not (1 <= i <= T <= dist.T) or T < t0:
        raise ValueError("need i <= T <= horizon")
    m = dist.params.m
    bundle = dist.params.variant == "c" or (dist.params.variant == "b" and m == 1)
    cols = [e for e in range(m * dist.T) if e // m + 1 <= T]
    sub = dist.outcomes[:, cols]
    child = np.array([e // m + 1 for e in cols])
    if bundle:
        use = child != i
        count = (sub[:, use] == i).sum(axis=1)
        extra = m if i == 2 else 0
    else:
        count = (sub == i).sum(axis=1)
        extra = 0
    degs = m + count + extra
    out: dict[int, Fraction] = {}
    for idx, dval in enumerate(degs):
        out[int(dval)] = out.get(int(dval), Fraction(0)) + dist.probs[idx]
    return out


def exact_diameter_law(dist: ExactDistribution) -> dict[int, Fraction]:
    """Exact law of the diameter (max distance over connected pairs).

    Distances computed here by batched Floyd-Warshall, deliberately a
    different algorithm from the BFS in :mod:`palab.metrics` so the two
    can be cross-checked.
    """
    T, m = dist.T, dist.params.m
    n = dist.n_outcomes
    INF = 127
    D = np.full((n, T + 1, T + 1), INF, dtype=np.int16)
    idx = np.arange(T + 1)
    D[:, idx, idx] = 0
    bundle = dist.params.variant == "c" or (dist.params.variant == "b" and m == 1)
    for e in range(m * T):
        c = e // m + 1
        tgt = dist.outcomes[:, e].astype(np.int64)
        if bundle and c == 1:
            D[:, 1, 2] = 1
            D[:, 2, 1] = 1
            continue
        rows = np.arange(n)
        keep = tgt != c
        D[rows[keep], c, tgt[keep]] = 1
        D[rows[keep], tgt[keep], c] = 1
    for k in range(1, T + 1):
        via = D[:, :, k][:, :, None] + D[:, k, None, :]
        np.minimum(D, via, out=D)
    sub = D[:, 1:, 1:]
    finite = np.where(sub >= INF, -1, sub)
    diams = finite.max(axis=(1, 2))
    out: dict[int, Fraction] = {}
    for i, dv in enumerate(diams):
        out[int(dv)] = out.get(int(dv), Fraction(0)) + dist.probs[i]
    return out
