"""Growth kernels, the step-by-step reference path, and block collapse."""

import random
from fractions import Fraction

import numpy as np
import pytest

from palab import collapse, freeze, generate, init, make_params, step
from palab.growth import DEFAULT_MAX_EDGES, RNG_NAME

CONFIGS = [
    ("a", 1, Fraction(0)),
    ("a", 1, Fraction(3, 2)),
    ("a", 2, Fraction(-1)),
    ("b", 1, Fraction(0)),
    ("b", 1, Fraction(-1, 2)),
    ("b", 2, Fraction(1)),
    ("c", 1, Fraction(1, 2)),
    ("c", 2, Fraction(0)),
    ("c", 2, Fraction(-1)),
    ("c", 3, Fraction(-2)),
]


def test_edge_count_large():
    g = generate(make_params("b", 1, 0), 10 ** 5, 1)
    assert g.t == 10 ** 5
    assert g.n_edges == 10 ** 5
    assert int(g.reconstruct_degrees().sum()) == 2 * 10 ** 5


@pytest.mark.parametrize("variant,m,delta", CONFIGS)
def test_degree_sum_and_shapes(variant, m, delta):
    t = 200
    g = generate(make_params(variant, m, delta), t, 17)
    assert g.targets.shape == (m * t,)
    deg = g.reconstruct_degrees()
    assert int(deg.sum()) == 2 * m * t
    assert deg[1:].min() >= 1
    # targets always point at existing vertices
    child = np.repeat(np.arange(1, t + 1), m)
    assert g.targets.min() >= 1
    assert np.all(g.targets <= child)


@pytest.mark.parametrize("variant,m,delta", CONFIGS)
def test_same_seed_same_log(variant, m, delta):
    p = make_params(variant, m, delta)
    g1 = generate(p, 150, 99)
    g2 = generate(p, 150, 99)
    assert np.array_equal(g1.targets, g2.targets)
    g3 = generate(p, 150, 100)
    assert not np.array_equal(g1.targets, g3.targets)


@pytest.mark.parametrize("variant,m,delta", CONFIGS)
def test_step_path_matches_kernel(variant, m, delta):
    """Growing one vertex at a time reproduces the vectorized kernel exactly."""
    p = make_params(variant, m, delta)
    t = 60
    st = init(p)
    rng = random.Random(23)
    # models a/b with m > 1 run the m=1 chain internally, one entry per step
    while len(st.targets) < m * t:
        step(st, rng)
    ref = freeze(st, seed=23)
    fast = generate(p, t, 23)
    assert np.array_equal(ref.targets, fast.targets)
    assert np.array_equal(ref.reconstruct_degrees(), fast.reconstruct_degrees())


@pytest.mark.parametrize("variant,delta", [("a", Fraction(0)), ("a", Fraction(1)),
                                           ("b", Fraction(-1)), ("b", Fraction(2))])
def test_collapse_equals_direct_generate(variant, delta):
    # m>1 for models a and b is defined by collapsing the m=1 process
    m, t = 2, 120
    p = make_params(variant, m, delta)
    g = generate(p, t, 31)
    g1 = generate(p.m1_params(), m * t, 31)
    gc = collapse(g1, m)
    assert np.array_equal(g.targets, gc.targets)


def test_collapse_degree_blocks():
    m, t = 3, 80
    p1 = make_params("a", 1, Fraction(1, 3))
    g1 = generate(p1, m * t, 7)
    gc = collapse(g1, m)
    d1 = g1.reconstruct_degrees()
    dc = gc.reconstruct_degrees()
    for v in range(1, t + 1):
        block = d1[m * (v - 1) + 1: m * v + 1]
        assert dc[v] == block.sum()


@pytest.mark.parametrize("variant,m,delta", CONFIGS)
def test_prefix_property(variant, m, delta):
    # the event log of a shorter run is a prefix of a longer run at the same seed
    p = make_params(variant, m, delta)
    g_long = generate(p, 300, 13)
    g_short = generate(p, 120, 13)
    assert np.array_equal(g_short.targets, g_long.targets[: m * 120])


@pytest.mark.parametrize("variant,m,delta", CONFIGS)
def test_degree_at_matches_truncated_run(variant, m, delta):
    p = make_params(variant, m, delta)
    g = generate(p, 200, 41)
    for s in (50, 125, 200):
        gs = generate(p, s, 41)
        ds = gs.reconstruct_degrees()
        for i in (1, 2, 3, s // 2, s):
            assert g.degree_at(i, s) == ds[i]


def test_degree_at_monotone():
    g = generate(make_params("c", 2, Fraction(-1)), 150, 8)
    for i in (1, 2, 7, 50):
        vals = [g.degree_at(i, s) for s in range(max(i, 2), 151)]
        assert vals[0] >= g.m
        assert all(b >= a for a, b in zip(vals, vals[1:]))


def test_variant_a_selfloop_rows():
    g = generate(make_params("a", 1, 0), 100, 2)
    child = np.arange(1, 101)
    loops = g.targets == child
    assert loops[0]            # the first vertex always loops onto itself
    assert loops.sum() >= 1
    assert np.array_equal(g.selfloop_mask(), loops)


def test_bundle_start_rows():
    # models with a two-vertex start encode the initial parallel pair as
    # vertex 1 targeting itself; no other row may equal its child
    for variant, m in (("b", 1), ("c", 1), ("c", 2), ("c", 3)):
        g = generate(make_params(variant, m, 0), 50, 4)
        assert g.bundle
        child = np.repeat(np.arange(1, 51), m)
        self_rows = np.flatnonzero(g.targets == child)
        assert self_rows.tolist() == list(range(m))
        assert np.all(g.targets[m: 2 * m] == 1)
        d = g.reconstruct_degrees()
        gs = generate(make_params(variant, m, 0), 2, 4)
        assert gs.reconstruct_degrees()[1:].tolist() == [2 * m, 2 * m]


def test_start_degrees_variant_a():
    g = generate(make_params("a", 1, 0), 1, 0)
    assert g.reconstruct_degrees()[1] == 2


def test_max_edges_guard():
    with pytest.raises(ValueError):
        generate(make_params("b", 1, 0), 100, 0, max_edges=50)
    assert DEFAULT_MAX_EDGES == 2 ** 26


def test_header_metadata():
    g = generate(make_params("c", 2, 1), 40, 77)
    assert g.seed == 77
    assert g.rng_name == RNG_NAME == "mt19937"
    assert g.format_version == "1"


def test_validate_passes():
    for variant, m, delta in CONFIGS:
        generate(make_params(variant, m, delta), 90, 5).validate()


def test_selfloop_birth_frequencies():
    """Model a: vertex i starts a new component with an exactly known probability.

    P(self-loop at i) = (1+delta)/((2+delta)(i-1)+1+delta), independent across i.
    Checked at 4.5 sigma per vertex over many replicates.
    """
    t, reps = 40, 30000
    for delta in (0, 1):
        p = make_params("a", 1, delta)
        counts = np.zeros(t + 1)
        for r in range(reps):
            g = generate(p, t, 1_000_000 * delta + r)
            child = np.arange(1, t + 1)
            counts[1:] += g.targets == child
        i = np.arange(2, t + 1, dtype=float)
        prob = (1 + delta) / ((2 + delta) * (i - 1) + 1 + delta)
        se = np.sqrt(prob * (1 - prob) / reps)
        z = np.abs(counts[2:] / reps - prob) / se
        assert counts[1] == reps
        assert z.max() < 4.5, f"delta={delta}: worst z={z.max():.2f}"
