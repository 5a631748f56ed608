"""Exhaustive small-horizon process enumeration and its verification reports."""

import json
import math
from fractions import Fraction

import numpy as np
import pytest

from palab import make_params
from palab.enumeration import (enumerate_process, exact_degree_pmf,
                               exact_diameter_law, verify_connection_bounds,
                               verify_negative_correlation)
from palab.metrics import diameter

B10 = make_params("b", 1, 0)


def test_two_outcome_start():
    dist = enumerate_process(B10, 3)
    assert dist.n_outcomes == 2
    assert sorted(dist.probs) == [Fraction(1, 2), Fraction(1, 2)]
    assert dist.total_mass() == 1


def test_marginal_t4():
    dist = enumerate_process(B10, 4)
    slot4 = 3  # vertex 4's only edge sits at row index 3
    assert dist.slot_child(slot4) == 4
    assert dist.marginal(slot4)[1] == Fraction(5, 12)
    assert dist.marginal(slot4)[2] == Fraction(5, 12)
    assert dist.marginal(slot4)[3] == Fraction(1, 6)


def test_event_prob_joint():
    dist = enumerate_process(B10, 4)
    joint = dist.event_prob([(3, 1, 1), (4, 1, 2)])
    assert joint == Fraction(1, 6)
    prod = dist.event_prob([(3, 1, 1)]) * dist.event_prob([(4, 1, 2)])
    assert prod == Fraction(5, 24)
    assert joint <= prod


def test_event_prob_edges():
    dist = enumerate_process(B10, 4)
    assert dist.event_prob([]) == 1
    assert dist.event_prob([(3, 1, 1), (3, 1, 2)]) == 0  # one edge, two targets
    assert dist.event_prob([(3, 1, 1), (3, 1, 1)]) == dist.event_prob([(3, 1, 1)])


@pytest.mark.parametrize(
    "variant,m,delta,T",
    [("b", 1, Fraction(0), 6), ("b", 1, Fraction(1), 5), ("c", 1, Fraction(-1, 2), 6),
     ("c", 2, Fraction(0), 4), ("c", 2, Fraction(-1), 5), ("a", 1, Fraction(0), 5),
     ("a", 1, Fraction(3, 2), 5)],
)
def test_total_mass_exactly_one(variant, m, delta, T):
    dist = enumerate_process(make_params(variant, m, delta), T)
    assert dist.total_mass() == Fraction(1)
    assert all(p > 0 for p in dist.probs)
    # every recorded target respects g(v,j) <= v
    child = np.repeat(np.arange(1, T + 1), m)
    assert np.all(dist.outcomes <= child)
    assert np.all(dist.outcomes >= 1)


def test_budget_guard():
    with pytest.raises(ValueError):
        enumerate_process(B10, 30)
    with pytest.raises(ValueError):
        enumerate_process(make_params("c", 2, 0), 12)


def test_unsupported_collapsed_models():
    with pytest.raises(ValueError):
        enumerate_process(make_params("a", 2, 0), 4)
    with pytest.raises(ValueError):
        enumerate_process(make_params("b", 2, 0), 4)


def test_horizon_guard():
    # start-pair models are born at T=2, the self-loop model at T=1
    with pytest.raises(ValueError):
        enumerate_process(B10, 1)
    with pytest.raises(ValueError):
        enumerate_process(make_params("a", 1, 0), 0)
    assert enumerate_process(B10, 2).n_outcomes == 1


def test_marginals_consistent_across_horizons():
    d4 = enumerate_process(B10, 4)
    d6 = enumerate_process(B10, 6)
    assert d4.marginal(2) == d6.marginal(2)
    assert d4.marginal(3) == d6.marginal(3)


def test_degree_pmf_variant_a():
    dist = enumerate_process(make_params("a", 1, 0), 3)
    pmf = exact_degree_pmf(dist, 2)
    assert pmf[1] == Fraction(8, 15)
    assert sum(pmf.values()) == 1


@pytest.mark.parametrize("T", [3, 4, 5])
def test_degree_pmf_initial_pair(T):
    dist = enumerate_process(B10, T)
    pmf1 = exact_degree_pmf(dist, 1)
    assert min(pmf1) >= 2  # the starting double edge never decays
    assert sum(pmf1.values()) == 1
    # degrees across all vertices pair up with edges
    total = sum(j * p for i in range(1, T + 1) for j, p in exact_degree_pmf(dist, i).items())
    assert total == 2 * T  # model b keeps exactly t edges at horizon t


def test_degree_pmf_truncated_horizon():
    dist = enumerate_process(B10, 5)
    sub = enumerate_process(B10, 4)
    for i in (1, 2, 3):
        assert exact_degree_pmf(dist, i, T=4) == exact_degree_pmf(sub, i)


def test_negative_correlation_reports():
    for variant, m, delta, T in (("b", 1, Fraction(0), 6), ("c", 2, Fraction(-1), 5),
                                 ("a", 1, Fraction(0), 5), ("c", 1, Fraction(1), 5)):
        dist = enumerate_process(make_params(variant, m, delta), T)
        rep = verify_negative_correlation(dist, max_groups=3, max_events_per_vertex=2)
        assert rep.passed
        assert rep.n_violations == 0
        assert rep.n_families > 0
        assert rep.max_excess <= 1e-12
        # singleton families are identities
        assert rep.tightest_ratio == 1.0
        if rep.tightest_ratio_multi is not None:
            assert rep.tightest_ratio_multi <= 1 + 1e-12


def test_connection_bounds_b_t3():
    rep = verify_connection_bounds(enumerate_process(B10, 3))
    assert rep.a == 0.5
    # slot (3,1) with target 2 realizes the maximum: (1/2) * sqrt(3 * 2)
    assert abs(rep.m1 - math.sqrt(6) / 2) <= 1e-12
    assert rep.m1 >= math.sqrt(3) / 2  # the s=1 cell contributes 0.866


def test_connection_bounds_monotone():
    m1s, m2s = [], []
    for T in (4, 5, 6, 7):
        rep = verify_connection_bounds(enumerate_process(B10, T))
        m1s.append(rep.m1)
        m2s.append(rep.m2)
        assert math.isfinite(rep.m1) and math.isfinite(rep.m2)
    assert all(b <= a + 1e-12 for a, b in zip(m1s, m1s[1:]))
    assert all(b <= a + 1e-12 for a, b in zip(m2s, m2s[1:]))


def test_outcome_graphs_valid():
    dist = enumerate_process(make_params("c", 2, 0), 4)
    seen = set()
    for idx in range(dist.n_outcomes):
        g = dist.to_graph(idx)
        g.validate()
        assert g.rng_name == "exact"
        seen.add(tuple(g.targets.tolist()))
    assert len(seen) == dist.n_outcomes


@pytest.mark.parametrize(
    "variant,m,delta,T",
    [("b", 1, Fraction(0), 5), ("c", 2, Fraction(0), 4), ("a", 1, Fraction(0), 4),
     ("a", 1, Fraction(1), 4), ("c", 2, Fraction(-1), 4)],
)
def test_diameter_law_agrees_with_bfs(variant, m, delta, T):
    """Two independent routes to the same exact law: tensorized all-pairs
    shortest paths over every outcome vs per-outcome BFS."""
    dist = enumerate_process(make_params(variant, m, delta), T)
    law = exact_diameter_law(dist)
    assert sum(law.values()) == 1
    recomputed = {}
    for idx in range(dist.n_outcomes):
        g = dist.to_graph(idx)
        d = diameter(g, method="exact", force=True).value
        recomputed[d] = recomputed.get(d, Fraction(0)) + dist.probs[idx]
    assert recomputed == law


def test_json_dump(tmp_path):
    dist = enumerate_process(B10, 4)
    path = tmp_path / "table.json"
    dist.dump_json(path)
    data = json.loads(path.read_text())
    assert data["variant"] == "b" and data["m"] == 1 and data["T"] == 4
    assert len(data["outcomes"]) == dist.n_outcomes
    probs = [Fraction(row["prob"]) for row in data["outcomes"]]
    assert sum(probs) == 1
    assert all(len(row["targets"]) == 4 for row in data["outcomes"])
