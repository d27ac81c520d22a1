import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from shortlists.bits import UniverseSpec
from shortlists.graph import ExplicitGraph, RandomGraphSeed, complete_bipartite, random_regular_graph
from shortlists.verify import (
    Budget,
    certificate_from_json,
    check_disperser,
    check_expander,
    count_neighbors,
    dispersion_threshold,
    exact_min_neighbors,
    min_neighbor_subset,
    recheck_witness,
    sample_subsets,
)


def brute_min(g, K):
    left = list(g.enumerate_left())
    return min(count_neighbors(g, s) for s in itertools.combinations(left, K))


def test_complete_graph_example(backend):
    g = complete_bipartite(UniverseSpec.single(3), UniverseSpec.single(2))
    cert = check_expander(g, 1, 4)
    assert cert.passed and cert.mode == "exhaustive"
    assert cert.to_json()["result"] == "pass"


def test_star_fails_with_witness(backend):
    g = ExplicitGraph({"0": ["0"], "1": ["0"]}, right=UniverseSpec.single(1))
    cert = check_expander(g, 2, 2)
    assert not cert.passed
    assert cert.witness == ["0", "1"] and cert.witness_neighbors == 1
    assert recheck_witness(g, cert)


@pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
def test_complete_graph_expands_for_every_size(backend, n):
    g = complete_bipartite(UniverseSpec.single(n), UniverseSpec.single(2))
    for s in range(1, 2**n + 1):
        # pruning cuts every branch at depth 0, so forcing exhaustive mode is cheap
        cert = check_expander(g, s, 4, Budget(mode="exhaustive"))
        assert cert.passed


def test_monotone_in_required_neighbors(backend):
    g = random_regular_graph(UniverseSpec.single(4), UniverseSpec.single(4), RandomGraphSeed(9, 3))
    true_min = brute_min(g, 3)
    for b in range(0, 17):
        assert check_expander(g, 3, b).passed == (b <= true_min)


def test_exhaustive_pass_survives_random_recount(backend):
    g = random_regular_graph(UniverseSpec.single(5), UniverseSpec.single(5), RandomGraphSeed(2, 6))
    cert = check_expander(g, 3, 9)
    assert cert.passed and cert.mode == "exhaustive"
    rng = random.Random(0)
    left = list(g.enumerate_left())
    for _ in range(100):
        assert count_neighbors(g, rng.sample(left, 3)) >= 9


def test_disperser_exact_verdict(backend):
    """Seeded degree-8 graph, 32 left nodes onto 32 right nodes, K = 4: the true minimum
    (16, from an itertools scan) meets the delta = 1/2 threshold."""
    g = random_regular_graph(UniverseSpec.single(5), UniverseSpec.single(5), RandomGraphSeed(0, 8))
    cert = check_disperser(g, 4, Fraction(1, 2))
    assert cert.mode == "exhaustive" and cert.subsets_total == 35960
    assert cert.threshold == dispersion_threshold(32, Fraction(1, 2)) == 16
    assert brute_min(g, 4) == 16
    assert cert.passed
    assert not check_disperser(g, 4, Fraction(15, 32)).passed


def test_sampled_mode_is_labelled_and_fails_are_definitive(backend):
    g = random_regular_graph(UniverseSpec.single(5), UniverseSpec.single(3), RandomGraphSeed(1, 2))
    budget = Budget(samples=2000, restarts=20, mode="sampled")
    cert = check_expander(g, 4, 8, budget)
    assert cert.mode == "sampled" and not cert.passed and cert.definitive
    assert recheck_witness(g, cert)
    ok = check_expander(g, 2, 1, budget)
    assert ok.passed and not ok.definitive
    assert ok.to_json()["samples"] == 2000


def test_certificate_json_roundtrip(backend):
    g = random_regular_graph(UniverseSpec.single(4), UniverseSpec.single(3), RandomGraphSeed(4, 2))
    for cert in (check_expander(g, 3, 7), check_disperser(g, 2, "1/4")):
        back = certificate_from_json(cert.to_json())
        assert back.to_json() == cert.to_json()


def test_min_neighbor_subset_on_hk(hk_graphs, backend):
    g = hk_graphs[2]
    sub, c = min_neighbor_subset(g, 1)
    assert c == min(len(g.neighbor_set(x)) for x in g.enumerate_left())
    assert count_neighbors(g, sub) == c
    _, exact = exact_min_neighbors(g, 2)
    assert exact == brute_min(g, 2)
    assert min_neighbor_subset(g, 2)[1] >= exact


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**40), st.integers(1, 4), st.integers(1, 5), st.integers(1, 16))
def test_verdict_matches_bruteforce(seed, degree, K, threshold):
    g = random_regular_graph(UniverseSpec.single(3), UniverseSpec.single(3), RandomGraphSeed(seed, degree))
    cert = check_expander(g, K, threshold)
    assert cert.passed == (brute_min(g, K) >= threshold)
    assert recheck_witness(g, cert)


@given(st.integers(1, 40), st.integers(1, 40), st.integers(0, 1000))
def test_sample_subsets_rows_are_distinct(n, k, seed):
    k = min(k, n)
    rows = sample_subsets(n, k, 50, seed)
    assert rows.shape == (50, k)
    for r in rows:
        assert len(set(r.tolist())) == k and all(0 <= v < n for v in r)
