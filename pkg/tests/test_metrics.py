"""Distances, diameter brackets, components: cross-checked against networkx."""

from fractions import Fraction

import networkx as nx
import numpy as np
import pytest

from palab import generate, make_params
from palab.metrics import (bfs, components, degree_histogram, diameter, n_geq,
                           typical_distance)

CONFIGS = [
    ("a", 1, Fraction(0)),
    ("a", 1, Fraction(2)),
    ("a", 2, Fraction(-1)),
    ("b", 1, Fraction(-1, 2)),
    ("b", 2, Fraction(1)),
    ("c", 2, Fraction(-1)),
    ("c", 2, Fraction(0)),
    ("c", 3, Fraction(-2)),
]


def to_networkx(g):
    """Rebuild the simple graph straight from the event log."""
    G = nx.Graph()
    G.add_nodes_from(range(1, g.t + 1))
    for v in range(1, g.t + 1):
        for j in range(1, g.m + 1):
            tgt = int(g.target(v, j))
            if g.params.variant == "a" and tgt == v:
                continue  # self-loops carry no distance
            if g.bundle and v == 1:
                G.add_edge(1, 2)
            else:
                G.add_edge(v, tgt)
    return G


@pytest.mark.parametrize("variant,m,delta", CONFIGS)
@pytest.mark.parametrize("seed", [1, 2])
def test_bfs_matches_networkx(variant, m, delta, seed):
    g = generate(make_params(variant, m, delta), 150, seed)
    G = to_networkx(g)
    for src in (1, 2, 75, 150):
        rep = bfs(g, src)
        lengths = nx.single_source_shortest_path_length(G, src)
        assert rep.source == src
        assert rep.n_reached == len(lengths)
        for v in range(1, g.t + 1):
            want = lengths.get(v, -1)
            assert rep.dist[v] == want
        assert rep.eccentricity == max(lengths.values())


@pytest.mark.parametrize("variant,m,delta", CONFIGS)
def test_exact_diameter_matches_networkx(variant, m, delta):
    g = generate(make_params(variant, m, delta), 180, 44)
    G = to_networkx(g)
    want = max(
        nx.diameter(G.subgraph(c))
        for c in nx.connected_components(G)
    )
    res = diameter(g, method="exact", force=True)
    assert res.exact
    assert res.lower == res.upper == want
    assert res.value == want


def test_bounds_bracket_contains_exact():
    hit_exact = 0
    n_cases = 0
    for variant, m, delta in CONFIGS:
        if variant == "a":
            continue  # bracketing is only advertised for connected graphs
        for seed in range(1, 14):
            g = generate(make_params(variant, m, delta), 400, seed)
            ex = diameter(g, method="exact", force=True).value
            br = diameter(g, method="bounds")
            n_cases += 1
            assert br.lower <= ex <= br.upper
            assert br.upper - br.lower <= 2
            hit_exact += br.lower == br.upper == ex
    # the double-sweep bracket should usually close completely
    assert n_cases >= 60
    assert hit_exact >= 0.8 * n_cases


def test_value_raises_when_bracket_open():
    g = generate(make_params("c", 2, 0), 3000, 5)
    res = diameter(g, method="bounds", bfs_budget=1)
    if res.lower != res.upper:
        with pytest.raises(ValueError):
            res.value


def test_components_variant_a():
    for delta, seed in ((0, 3), (1, 4), (2, 5)):
        g = generate(make_params("a", 1, delta), 250, seed)
        cnt, labels = components(g)
        G = to_networkx(g)
        assert cnt == nx.number_connected_components(G)
        # label partition must match networkx exactly
        for comp in nx.connected_components(G):
            comp = sorted(comp)
            assert len({labels[v] for v in comp}) == 1
        # one component per self-loop row
        child = np.arange(1, g.t + 1)
        assert cnt == int((g.targets == child).sum())
        assert labels[1:].max() == cnt


@pytest.mark.parametrize("variant,m,delta", [c for c in CONFIGS if c[0] != "a"])
def test_other_variants_connected(variant, m, delta):
    g = generate(make_params(variant, m, delta), 200, 9)
    cnt, labels = components(g)
    assert cnt == 1
    assert np.all(labels[1:] == 1)


def test_typical_distance_reproducible():
    g = generate(make_params("c", 2, 0), 500, 18)
    r1 = typical_distance(g, 200, seed=7)
    r2 = typical_distance(g, 200, seed=7)
    assert np.array_equal(r1.samples, r2.samples)
    assert r1.mean == r2.mean
    r3 = typical_distance(g, 200, seed=8)
    assert not np.array_equal(r1.samples, r3.samples)


def test_typical_distance_statistics():
    g = generate(make_params("b", 2, 0), 600, 25)
    res = typical_distance(g, 400, seed=1)
    assert res.n_connected + res.n_disconnected == 400
    assert res.n_disconnected == 0
    d = diameter(g, method="exact", force=True).value
    assert 0 <= res.samples.min()
    assert res.samples.max() <= d
    assert res.max == res.samples.max()
    assert abs(res.mean - res.samples.mean()) < 1e-12
    assert res.median == float(np.median(res.samples))


def test_typical_distance_disconnected_pairs_counted():
    # delta=2 makes early self-loops common enough for several components
    g = generate(make_params("a", 1, 2), 300, 6)
    cnt, _ = components(g)
    assert cnt >= 2
    res = typical_distance(g, 500, seed=3)
    assert res.n_disconnected > 0
    assert res.n_connected + res.n_disconnected == 500


def test_degree_histogram_and_tail_counts():
    g = generate(make_params("c", 2, 1), 400, 12)
    hist = degree_histogram(g)
    deg = g.reconstruct_degrees()[1:]
    assert hist.sum() == g.t
    for k in range(len(hist)):
        assert hist[k] == int((deg == k).sum())
    assert n_geq(g, 1) == g.t
    assert n_geq(g, 2) == g.t  # every vertex keeps at least its m birth edges
    for u in (3.0, 5.5, 20.0):
        assert n_geq(g, u) == int((deg >= u).sum())
    assert n_geq(g, deg.max() + 1) == 0
