"""Closed-form evaluators and small exact models.

Everything here is a numeric oracle independent of graph simulation:
the degree-law pmf, the solvable constants, upper bounds on degree
tails, truncated path sums with analytic tails, the reinforced-urn /
beta-binomial pair, and the multinomial cell-occupancy model.  Gamma
ratios go through lgamma differences so nothing overflows at t = 10^7.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .params import PAParams

# -- derived constants --------------------------------------------------------


def tau_of(params: PAParams) -> float:
    return params.tau


def _require_tau_in_2_3(params: PAParams):
    if not (2.0 < params.tau < 3.0):
        raise ValueError(f"needs tau in (2,3), got tau={params.tau} (delta<0 required)")


def c_g(params: PAParams, sigma: float) -> float:
    """4/|ln(tau-2)| + 4*sigma/ln m; finite only for tau in (2,3), m >= 2."""
    _require_tau_in_2_3(params)
    if params.m < 2:
        raise ValueError("needs m >= 2")
    return 4.0 / abs(math.log(params.tau - 2.0)) + 4.0 * sigma / math.log(params.m)


def k_star(params: PAParams, t: int) -> int:
    """floor(ln ln t / |ln(tau-2)|)."""
    _require_tau_in_2_3(params)
    if t < 3:
        raise ValueError("needs t >= 3")
    return int(math.floor(math.log(math.log(t)) / abs(math.log(params.tau - 2.0))))


def q_t(params: PAParams, t: int) -> float:
    """Cell probability t^{1/(tau-1) - 2} / (ln t)^2."""
    return t ** (1.0 / (params.tau - 1.0) - 2.0) / math.log(t) ** 2


def lambda_t(params: PAParams, t: int) -> float:
    """Erdos-Renyi comparison edge probability (1 - (1-q_t)^t)/2."""
    q = q_t(params, t)
    return 0.5 * (-math.expm1(t * math.log1p(-q)))


def diameter_floor(t: int, C: float, m: int) -> float:
    """L(t, C) = ln t / ln(3*C*m^2*ln t); C is the paper-level absolute
    constant, exposed as a parameter because no numeric value exists."""
    if t < 3:
        raise ValueError("needs t >= 3")
    x = 3.0 * C * m * m * math.log(t)
    if x <= 1.0:
        raise ValueError("log argument must exceed 1")
    return math.log(t) / math.log(x)


def gamma_root(delta) -> float:
    """Root in (0,1) of gamma + (1+delta)*(1+ln gamma) = 0, by bisection."""
    d = float(delta)
    if d <= -1.0:
        raise ValueError("needs delta > -1")

    def f(g):
        return g + (1.0 + d) * (1.0 + math.log(g))

    lo, hi = 1e-9, 1.0
    if f(lo) >= 0.0:
        raise ValueError("no sign change on (1e-9, 1)")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if f(mid) < 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def height_const(delta) -> float:
    """(1+delta)/(gamma*(2+delta)): tree-height slope in units of ln t."""
    d = float(delta)
    return (1.0 + d) / (gamma_root(d) * (2.0 + d))


def c_var(params: PAParams) -> float:
    """Variance constant 8*(m+1+delta)*m^2."""
    return 8.0 * params.m_delta * params.m ** 2


def u1(params: PAParams, t: int) -> float:
    """Inner-core degree threshold t^{1/(2(tau-1))}/sqrt(ln t)."""
    return t ** (1.0 / (2.0 * (params.tau - 1.0))) / math.sqrt(math.log(t))


def ez_lower_bound(params: PAParams, t: int, k: int) -> float:
    """Lower bound on the expected number of proper depth-k trees:

        (t/a) * (a/m^{k+1})^{m^{k+1}} * (1 - m_d*m^{k+1}/t)^{m t}

    with a = (m+delta)/(3(2m+delta)) and m_d = m+1+delta.  Evaluated in
    log space; tiny but positive for moderate t, diverging as t grows.
    """
    m = params.m
    if m < 2:
        raise ValueError("proper trees need m >= 2")
    if k < 0:
        raise ValueError("k must be >= 0")
    a = params.a_md
    mk = m ** (k + 1)
    if params.m_delta * mk > t:
        raise ValueError(f"bound needs (m+1+delta)*m^(k+1) = {params.m_delta * mk:g} <= t = {t}")
    log_val = (math.log(t / a) + mk * math.log(a / mk)
               + m * t * math.log1p(-params.m_delta * mk / t))
    return math.exp(log_val)


def constants(params: PAParams, t: int | None = None, sigma: float | None = None,
              C: float | None = None) -> dict:
    """All derived constants that exist for (params, t, sigma, C)."""
    out = {
        "variant": params.variant,
        "m": params.m,
        "delta": float(params.delta),
        "tau": params.tau,
        "a": params.a,
        "delta_prime": float(params.delta_prime),
        "eta": params.eta,
        "a_md": params.a_md,
        "m_delta": params.m_delta,
        "c_var": c_var(params),
    }
    if 2 + params.delta != 0:
        out["Delta"] = params.Delta
    if params.delta > -1:
        out["gamma"] = gamma_root(params.delta)
        out["height_const"] = height_const(params.delta)
    if t is not None:
        out["u1"] = u1(params, t)
        out["q_t"] = q_t(params, t)
        out["lambda_t"] = lambda_t(params, t)
        if 2.0 < params.tau < 3.0:
            out["k_star"] = k_star(params, t)
        if C is not None:
            out["L"] = diameter_floor(t, C, params.m)
    if sigma is not None and 2.0 < params.tau < 3.0 and params.m >= 2:
        out["C_G"] = c_g(params, sigma)
    return out


# -- degree law ---------------------------------------------------------------


def degree_law_pmf(params: PAParams, k: int) -> float:
    """Limit degree pmf p_k for k >= m (power law with exponent tau)."""
    m, d = params.m, float(params.delta)
    if k < m:
        raise ValueError(f"pmf defined for k >= m, got k={k}")
    chi = 2.0 + d / m
    lg = math.lgamma
    return chi * math.exp(lg(k + d) + lg(m + d + chi) - lg(m + d) - lg(k + 1 + d + chi))


def degree_law_tail(params: PAParams, k: int) -> float:
    """S_k = sum_{j >= k} p_j, exact in closed form.

    p_j telescopes as S_j - S_{j+1} with
    S_j = Gamma(j+d)Gamma(m+d+chi) / (Gamma(m+d)Gamma(j+d+chi)),
    S_m = 1, which is what makes 1e-8 normalization checks cheap.
    """
    m, d = params.m, float(params.delta)
    if k < m:
        raise ValueError(f"tail defined for k >= m, got k={k}")
    chi = 2.0 + d / m
    lg = math.lgamma
    return math.exp(lg(k + d) + lg(m + d + chi) - lg(m + d) - lg(k + d + chi))


# -- f_k path sums ------------------------------------------------------------


def fk_bound_constant(a: float, b: float) -> float:
    """C_{a,b} = 1/(b-a) + 2/(1-a-b), valid for 0 < a < b, a+b < 1."""
    if not (0.0 < a < b and a + b < 1.0):
        raise ValueError(f"need 0 < a < b and a+b < 1, got a={a}, b={b}")
    return 1.0 / (b - a) + 2.0 / (1.0 - a - b)


def _zeta_tail(s: float, x: float) -> float:
    """sum_{n >= 0} (x+n)^{-s} for s > 1 (Hurwitz zeta at offset x),
    via direct terms plus an Euler-Maclaurin remainder."""
    if s <= 1.0:
        raise ValueError("series diverges for s <= 1")
    N = 2048
    n = np.arange(N, dtype=np.float64)
    head = float(np.sum((x + n) ** (-s)))
    y = x + N
    tail = y ** (1.0 - s) / (s - 1.0) + 0.5 * y ** (-s) + s * y ** (-s - 1.0) / 12.0 \
        - s * (s + 1.0) * (s + 2.0) * y ** (-s - 3.0) / 720.0
    return head + tail


@dataclass
class FkValue:
    """Truncated self-avoiding path sum plus an upper bound on the
    rest of the (infinite) sum.  `total` is a certified upper bound;
    `truncated` alone is a lower bound."""
    truncated: float
    tail: float

    @property
    def total(self) -> float:
        return self.truncated + self.tail


def _w_matrix(a: float, n: int) -> np.ndarray:
    s = np.arange(1, n + 1, dtype=np.float64)
    lo = np.minimum.outer(s, s)
    hi = np.maximum.outer(s, s)
    return lo ** (-a) * hi ** (a - 1.0)


def fk_bruteforce(a: float, i: int, t: int, k: int, s_max: int = 200) -> FkValue:
    """Sum over self-avoiding (s_0=i, ..., s_k=t) of the step weights
    1/((s /\\ s')^a (s \\/ s')^{1-a}), intermediate values truncated at
    s_max with an analytic bound on the dropped part.

    The tail formulas assume every dropped intermediate exceeds t, so
    s_max >= t is required.  k <= 3 (the combinatorics explode beyond).
    """
    if not 0.0 < a < 0.5:
        raise ValueError("need a in (0, 1/2)")
    if not (1 <= i < t):
        raise ValueError("need 1 <= i < t")
    if k < 1 or k > 3:
        raise ValueError("supported depths: 1 <= k <= 3")
    if s_max < t:
        raise ValueError("tail bound needs s_max >= t")
    if s_max > 200:
        raise ValueError("combinatorial guard: s_max <= 200")
    if k == 1:
        return FkValue(truncated=i ** (-a) * t ** (a - 1.0), tail=0.0)

    W = _w_matrix(a, s_max)
    wi = W[i - 1].copy()
    wt = W[:, t - 1].copy()
    for x in (i - 1, t - 1):
        wi[x] = 0.0
        wt[x] = 0.0
    if k == 2:
        trunc = float(wi @ wt)
        # every dropped term has s > s_max >= t: w(i,s)w(s,t) =
        # 1/(i^a t^a s^{2-2a}) exactly
        tail = _zeta_tail(2.0 - 2.0 * a, s_max + 1.0) * i ** (-a) * t ** (-a)
        return FkValue(truncated=trunc, tail=tail)

    Wmid = W.copy()
    Wmid[i - 1, :] = 0.0
    Wmid[:, i - 1] = 0.0
    Wmid[t - 1, :] = 0.0
    Wmid[:, t - 1] = 0.0
    np.fill_diagonal(Wmid, 0.0)
    trunc = float(wi @ Wmid @ wt)
    # Dropped paths have s_1 > s_max or s_2 > s_max.  With
    # F2(x,y) = sum_s w(x,s)w(s,y) <= K_a/sqrt(x*y) (split the sum at
    # x and y; K_a below), each case telescopes to a zeta tail:
    #   sum_{s1>s_max} w(i,s1)*F2(s1,t) <= K_a*zeta(3/2-a)/(i^a sqrt(t))
    # and symmetrically for s2.
    K_a = 2.0 + 2.0 / (1.0 - 2.0 * a) + 1.0 / (math.e * (0.5 - a))
    z = _zeta_tail(1.5 - a, s_max + 1.0)
    tail = K_a * z * (i ** (-a) / math.sqrt(t) + t ** (-a) / math.sqrt(i))
    return FkValue(truncated=trunc, tail=tail)


# -- degree tail bounds (fixed vertices) --------------------------------------


def degree_tail_constant(params: PAParams, j: int) -> float:
    """C_j of the degree-tail bound: Gamma(j+d)/(Gamma(j)Gamma(1+d)) at
    m=1, else the recursion C_m=1, C_j = (j-1+d)/(j-m) * C_{j-1}."""
    m, d = params.m, float(params.delta)
    if j < m:
        raise ValueError(f"need j >= m, got j={j}")
    if m == 1:
        lg = math.lgamma
        return math.exp(lg(j + d) - lg(j) - lg(1.0 + d))
    c = 1.0
    for jj in range(m + 1, j + 1):
        c *= (jj - 1.0 + d) / (jj - m)
    return c


def degree_tail_bound(params: PAParams, i: int, t: int, j: int) -> float:
    """Upper bound on P(D_i(t)=j) (variants a, b) or P(E_i(t)=j)
    (variant c, E the dominated one-step counter):
    C_j * Gamma(t-a1)Gamma(i+a2) / (Gamma(t+a2)Gamma(i-a1))."""
    if not (1 <= i <= t):
        raise ValueError("need 1 <= i <= t")
    frac = float((params.m + params.delta) / (2 * params.m + params.delta))
    a1, a2 = (0.0, frac) if params.variant == "a" else (frac, 0.0)
    lg = math.lgamma
    ratio = math.exp(lg(t - a1) + lg(i + a2) - lg(t + a2) - lg(i - a1))
    return degree_tail_constant(params, j) * ratio


def degree_chain_pmf(params: PAParams, i: int, t: int) -> np.ndarray:
    """Exact pmf of the one-step degree chain of vertex i at time t.

    Variants a/b (m=1): the law of D_i(t) itself (for "a" the birth
    value is 2 with the self-loop probability, else 1).  Variant c: the
    law of the dominated counter E_i, which starts at m and gains at
    most one per time step with probability (j+delta)/((2m+delta)*s).
    Entry [j] of the result is P(value = j).
    """
    m, d = params.m, float(params.delta)
    if params.variant in ("a", "b") and m != 1:
        raise ValueError("exact chain for variants a/b only at m=1")
    if params.variant == "c":
        if i < 3:
            raise ValueError("variant c chain starts at vertices i >= 3")
        start, s0 = m, i
        denom = lambda s: (2 * m + d) * s
    elif params.variant == "b":
        if i <= 2:
            return _fixed_start_pmf(2, i, t, d, params.variant)
        start, s0 = 1, i
        denom = lambda s: (2 + d) * s
    else:
        if i == 1:
            return _fixed_start_pmf(2, i, t, d, params.variant)
        p_loop = (1 + d) / ((2 + d) * (i - 1) + 1 + d)
        pmf1 = _fixed_start_pmf(1, i, t, d, params.variant)
        pmf2 = _fixed_start_pmf(2, i, t, d, params.variant)
        n = max(len(pmf1), len(pmf2))
        out = np.zeros(n)
        out[: len(pmf1)] += (1 - p_loop) * pmf1
        out[: len(pmf2)] += p_loop * pmf2
        return out
    pmf = np.zeros(t - s0 + start + 1)
    pmf[start] = 1.0
    for s in range(s0, t):
        j = np.arange(len(pmf))
        up = (j + d) / denom(s)
        nxt = pmf * (1 - up)
        nxt[1:] += pmf[:-1] * up[:-1]
        pmf = nxt
    return pmf


def _fixed_start_pmf(start, i, t, d, variant):
    if variant == "a":
        denom = lambda s: (2 + d) * s + 1 + d
    else:
        denom = lambda s: (2 + d) * s
    s0 = max(i, 2 if variant == "b" else 1)
    pmf = np.zeros(t - s0 + start + 1)
    pmf[start] = 1.0
    for s in range(s0, t):
        j = np.arange(len(pmf))
        up = (j + d) / denom(s)
        nxt = pmf * (1 - up)
        nxt[1:] += pmf[:-1] * up[:-1]
        pmf = nxt
    return pmf


# -- Polya urn / beta-binomial ------------------------------------------------


def beta_binomial_pmf(n: int, alpha: int, beta: int, k: int) -> Fraction:
    """P(X = k) for the number of successes in n exchangeable draws with
    P(success | r successes in s draws) = (alpha+r)/(alpha+beta+s):
    C(n,k) * prod(alpha..alpha+k-1) * prod(beta..beta+n-k-1)
           / prod(alpha+beta..alpha+beta+n-1), exact."""
    if not (0 <= k <= n):
        raise ValueError("need 0 <= k <= n")
    if alpha < 1 or beta < 1:
        raise ValueError("integer pseudo-counts >= 1 required")
    num = math.comb(n, k)
    for r in range(k):
        num *= alpha + r
    for r in range(n - k):
        num *= beta + r
    den = 1
    for r in range(n):
        den *= alpha + beta + r
    return Fraction(num, den)


def beta_binomial_pmf_all(n: int, alpha: int, beta: int) -> list[Fraction]:
    return [beta_binomial_pmf(n, alpha, beta, k) for k in range(n + 1)]


def polya_urn_exact_pmf(params: PAParams, t: int) -> list[Fraction]:
    """Exact pmf of the red-draw count after m*t reinforced draws.

    The urn tracks ball masses S_1, S_2 directly (start m*(2+d') red,
    m*(t-2)*(2+d') blue, reinforcement 2+d' per draw); the DP state is
    the number of red draws so far and probabilities are exact
    rationals computed from the ball masses at every step.
    """
    m = params.m
    if t < 3:
        raise ValueError("needs t >= 3")
    dp = params.delta_prime  # Fraction
    c = 2 + dp  # reinforcement, exact
    n = m * t
    s1_0 = m * c
    s2_0 = m * (t - 1) * c - m * c
    probs = [Fraction(0)] * (n + 1)
    probs[0] = Fraction(1)
    for s in range(n):
        total = s1_0 + s2_0 + s * c
        nxt = [Fraction(0)] * (n + 1)
        for r in range(s + 1):
            p = probs[r]
            if p == 0:
                continue
            s1 = s1_0 + r * c
            p_red = s1 / total
            nxt[r + 1] += p * p_red
            nxt[r] += p * (1 - p_red)
        probs = nxt
    return probs


def polya_urn(params: PAParams, t: int, reps: int, seed: int) -> np.ndarray:
    """Empirical pmf of the red-edge count S_1(mt)/(2+d') - m over reps
    urn simulations.  The subtracted m strips the initial red mass, so
    the count equals the number of red draws (beta-binomial with
    alpha=m, beta=m(t-2)); vectorized across replicates."""
    m = params.m
    if t < 3:
        raise ValueError("needs t >= 3")
    if reps < 1:
        raise ValueError("reps >= 1")
    rng = np.random.default_rng(seed)
    n = m * t
    red = np.zeros(reps, dtype=np.int64)
    base = m * (t - 1)
    for s in range(n):
        # P(red) = S_1/(S_1+S_2) = (m + red)/(m(t-1) + s): the common
        # factor (2+d') cancels, so the draw is delta-free
        thresh = (m + red) / (base + s)
        red += rng.random(reps) < thresh
    counts = np.bincount(red, minlength=n + 1)
    return counts / reps


# -- multinomial occupancy graph ----------------------------------------------


@dataclass
class MultinomialGraph:
    n: int
    edges: list[tuple[int, int]]
    M: int


def multinomial_edge_count_samples(n_t: int, q_t_: float, trials: int,
                                   reps: int, seed: int) -> np.ndarray:
    """M = number of occupied cells, for reps independent experiments of
    `trials` throws into e_t = n_t(n_t-1)/2 cells of probability q_t_
    each (rest overflow).  Chunked so memory stays bounded."""
    e_t = n_t * (n_t - 1) // 2
    if e_t * q_t_ > 1.0:
        raise ValueError("cell probabilities exceed 1")
    if trials < 1:
        raise ValueError("trials >= 1")
    if q_t_ == 0.0:
        return np.zeros(reps, dtype=np.int64)
    rng = np.random.default_rng(seed)
    out = np.empty(reps, dtype=np.int64)
    done = 0
    chunk = max(1, min(reps, 2 ** 22 // trials + 1))
    while done < reps:
        r = min(chunk, reps - done)
        u = rng.random((r, trials))
        cells = np.minimum((u / q_t_).astype(np.int64), e_t)  # e_t = overflow
        cells.sort(axis=1)
        distinct = (np.diff(cells, axis=1) != 0).sum(axis=1) + 1
        distinct -= (cells[:, -1] == e_t)  # overflow cell is not an edge
        out[done:done + r] = distinct
        done += r
    return out


def multinomial_graph(n_t: int, q_t_: float, trials: int, seed: int) -> MultinomialGraph:
    """One realization: graph on [n_t] whose k-th potential edge is
    present iff cell k received at least one of the `trials` throws."""
    e_t = n_t * (n_t - 1) // 2
    if e_t * q_t_ > 1.0:
        raise ValueError("cell probabilities exceed 1")
    rng = np.random.default_rng(seed)
    u = rng.random(trials)
    hit = u[u < e_t * q_t_]
    cells = np.unique((hit / q_t_).astype(np.int64)) if hit.size else np.array([], dtype=np.int64)
    rows, cols = np.triu_indices(n_t, 1)
    edges = [(int(rows[k]) + 1, int(cols[k]) + 1) for k in cells]
    return MultinomialGraph(n=n_t, edges=edges, M=len(edges))


def multinomial_expected_edges(n_t: int, q_t_: float, trials: int) -> float:
    """E[M] = e_t*(1-(1-q_t)^trials) (equals 2*m_t in the coupling)."""
    e_t = n_t * (n_t - 1) // 2
    return e_t * (-math.expm1(trials * math.log1p(-q_t_)))
