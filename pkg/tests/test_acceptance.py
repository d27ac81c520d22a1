"""Acceptance criteria 1-7, one pass/fail line each (see the terminal summary)."""

import itertools
import math
import random
import time

import numpy as np
import pytest

from shortlists import kernels
from shortlists.bits import UniverseSpec, bit_width
from shortlists.combinators import (
    PipelineConfig,
    build_hk,
    default_cap,
    hk_degree,
    pad_right_labels,
    prefix_merge,
    product,
    shifted_union,
)
from shortlists.demo import demo_corpus, demo_machine_table
from shortlists.graph import ExplicitGraph, RandomGraphSeed, random_regular_graph
from shortlists.matching import discard_bound_check, random_streams
from shortlists.shortlist import HkFamily, MachineTable, StandardMachine, brute_force_C
from shortlists.verify import (
    Budget,
    check_disperser,
    check_expander,
    exact_min_neighbors,
    recheck_witness,
)

C = 2
BUILD_LIMIT_S = 10.0
K4_LIMIT_S = 300.0
MIN_SAMPLES = 10**5
STREAMS = 1000
INSTANCES = 100
E2E_LIMIT_S = 120.0


@pytest.fixture(scope="module")
def certified():
    """H_2, H_3 (exhaustive) and H_4 (sampled), with build times."""
    out = {}
    for k in (2, 3, 4):
        t0 = time.perf_counter()
        g = build_hk(PipelineConfig(k=k, c=C, left_len_cap=default_cap(k), seed=42))
        out[k] = (g, time.perf_counter() - t0)
    return out


def test_criterion_1_expansion_certification(certified, acceptance):
    parts, ok = [], True
    for k in (2, 3):
        g, dt = certified[k]
        cert = g.certificates[-1]
        K = 2**k
        good = (
            cert.passed
            and cert.mode == "exhaustive"
            and (cert.subset_size, cert.threshold) == (math.ceil(K / C**2), K)
            and dt < BUILD_LIMIT_S
        )
        ok &= good
        parts.append(f"k={k} ({cert.subset_size},{cert.threshold}) {cert.mode} {cert.result} {dt:.2f}s")
    g, dt = certified[4]
    cert = g.certificates[-1]
    good = cert.passed and cert.mode == "sampled" and cert.samples >= MIN_SAMPLES and dt < K4_LIMIT_S
    ok &= good
    parts.append(
        f"k=4 ({cert.subset_size},{cert.threshold}) sampled {cert.samples} + {cert.restarts} restarts, "
        f"min observed {cert.min_observed}, {dt:.2f}s"
    )
    assert acceptance(1, "expansion certification", ok, "; ".join(parts))


def test_criterion_2_matching_lemma(certified, acceptance):
    ok, parts = True, []
    for k in (2, 3, 4):
        g, _ = certified[k]
        K = 2**k
        A = math.ceil(K / C**2)
        streams = random_streams(g, STREAMS, K, seed=1000 + k)
        rep = discard_bound_check(g, A, K, streams)
        ok &= rep.passed and rep.streams == STREAMS
        if k == 3:
            ok &= rep.max_discards <= 1
        parts.append(f"k={k}: {rep.streams} streams, max discards {rep.max_discards} < {A}")
    assert acceptance(2, "matching lemma", ok, "; ".join(parts))


def _restrict(g, left):
    return ExplicitGraph({x: list(g.neighbors(x)) for x in left}, left=left, right=g.right)


def _cert_key(cert):
    return (cert.passed, cert.mode, cert.subsets_total, cert.threshold, tuple(cert.witness), cert.witness_neighbors)


def test_criterion_3_combinator_algebra(acceptance):
    exhaustive = Budget(mode="exhaustive")
    rng = random.Random(2024)

    # (i) prefix merge keeps disperser verdicts
    merge_total = merge_pass_before = merge_bad = 0
    for i in range(INSTANCES * 2):
        m = rng.choice([4, 5])
        g = random_regular_graph(
            UniverseSpec.single(rng.choice([4, 5])), UniverseSpec.single(m), RandomGraphSeed(i, rng.randint(3, 8))
        )
        K = rng.randint(2, 4)
        p = rng.randint(1, m - 1)
        before = check_disperser(g, K, "1/2", exhaustive)
        merged = prefix_merge(g, p)
        after = check_disperser(merged, K, "1/2", exhaustive)
        frac_before = exact_min_neighbors(g, K)[1] / 2**m
        frac_after = exact_min_neighbors(merged, K)[1] / 2**p
        merge_total += 1
        merge_pass_before += before.passed
        if (before.passed and not after.passed) or frac_after < frac_before:
            merge_bad += 1

    # (ii) product of certified (A,B) and (B,B) expanders
    prod_total = prod_bad = tried = 0
    seed = 0
    while prod_total < INSTANCES:
        seed += 1
        tried += 1
        A = rng.choice([1, 2, 3])
        B = rng.choice([3, 4])
        mid = UniverseSpec.single(5)
        g = random_regular_graph(UniverseSpec.single(4), mid, RandomGraphSeed(seed, 4))
        f = random_regular_graph(mid, UniverseSpec.single(rng.choice([3, 4])), RandomGraphSeed(seed + 10**6, 3))
        if not (check_expander(g, A, B, exhaustive).passed and check_expander(f, B, B, exhaustive).passed):
            continue
        prod_total += 1
        prod_bad += not check_expander(product(g, f), A, B, exhaustive).passed

    # (iii) pad and shift leave certificates unchanged
    relabel_total = relabel_bad = 0
    for i in range(INSTANCES):
        rlen = rng.choice([3, 4])
        g = random_regular_graph(UniverseSpec.single(4), UniverseSpec.single(rlen), RandomGraphSeed(5000 + i, rng.randint(1, 4)))
        K = rng.randint(1, 4)
        Kp = rng.randint(1, 2 ** rlen)
        base = _cert_key(check_expander(g, K, Kp, exhaustive))
        other = random_regular_graph(UniverseSpec.single(3), UniverseSpec.single(2), RandomGraphSeed(i, 2))
        shifted = _restrict(shifted_union([other, g]), g.left)
        variants = [pad_right_labels(g, rlen + rng.randint(1, 3)), shifted_union([g]), shifted]
        for v in variants:
            relabel_total += 1
            relabel_bad += _cert_key(check_expander(v, K, Kp, exhaustive)) != base

    ok = merge_bad == 0 and prod_bad == 0 and relabel_bad == 0 and merge_pass_before > 0
    ok &= merge_total >= INSTANCES and prod_total >= INSTANCES and relabel_total >= INSTANCES
    detail = (
        f"merge {merge_total} instances ({merge_pass_before} dispersers), {merge_bad} regressions; "
        f"product {prod_total} certified pairs (of {tried} drawn), {prod_bad} failures; "
        f"relabel {relabel_total} comparisons, {relabel_bad} mismatches"
    )
    assert acceptance(3, "combinator algebra", ok, detail)


@pytest.fixture(scope="module")
def demo():
    table = demo_machine_table(7)
    return StandardMachine(table, HkFamily(k_max=4, c=C, seed=0)), demo_corpus(table, 7)


def _in_range(x, k):
    n = len(x)
    return bit_width(n) <= k <= min(n, 4) and n <= default_cap(k)


def test_criterion_4_end_to_end(demo, acceptance):
    m, corpus = demo
    t0 = time.perf_counter()
    entries = m.base.entries
    out_lens = {len(x) for x, _ in entries.values()}
    prog_lens = {len(q) for q in entries}
    coverage = len(entries) >= 50 and min(out_lens) <= 3 and max(out_lens) >= 12 and prog_lens == set(range(2, 7))
    in_range = bad = 0
    worst = 0
    for x in corpus:
        rec = brute_force_C(m, x, len(x) + 3)
        best = m.best_in_list(x)
        if best is None or len(best) > len(x) + 3:
            bad += 1
            continue
        if rec.C_U is not None and _in_range(x, rec.C_U):
            in_range += 1
            worst = max(worst, len(best) - rec.C_U)
            bad += len(best) > rec.C_U + 3
    dt = time.perf_counter() - t0
    ok = coverage and bad == 0 and in_range > 0 and dt < E2E_LIMIT_S
    detail = (
        f"table {len(entries)} entries, outputs {min(out_lens)}-{max(out_lens)}, programs {min(prog_lens)}-{max(prog_lens)}; "
        f"{len(corpus)} strings, {in_range} in range, worst slack {worst}, {bad} failures, {dt:.1f}s"
    )
    assert acceptance(4, "shortlist end to end", ok, detail)


HAND_TABLE = {
    "": ("110", 1),
    "1": ("0110101", 2),
    "00": ("111000111", 3),
    "11": ("1010101010", 1),
    "010": ("00000000011111111", 7),
}


def test_criterion_5_clause_two(demo, acceptance):
    cases = []
    m_demo, corpus = demo
    cases += [(m_demo, x) for x in corpus]
    hand = StandardMachine(MachineTable(HAND_TABLE), HkFamily(k_max=4, c=C, seed=0))
    cases += [(hand, x) for x, _ in HAND_TABLE.values()]
    covered = bad = 0
    for m, x in cases:
        rec = brute_force_C(m, x, len(x) + 3)
        if rec.C_U is None or 2**rec.C_U >= len(x):
            continue
        covered += 1
        block = [p for p in m.f(x) if p.startswith("101")]
        if not any(len(p) == rec.C_U + 3 and m.eval_U(p) == x for p in block):
            bad += 1
    ok = bad == 0 and covered >= len(HAND_TABLE)
    assert acceptance(5, "clause-2 coverage", ok, f"{covered} strings with 2^C_U < |x|, {bad} uncovered")


def _degree_sum(m, x):
    total = 0
    for k in m.hk_range(x):
        g = m.family.graph(k)
        if g is not None and x in g.left:
            total += len(g.neighbors(x))
    return total


def _extended_bound(n):
    """List-size bound as if H_k existed for every k (pipeline degree for k >= 2)."""
    total = 1 + (2 ** bit_width(n) - 1)
    for k in range(bit_width(n), n + 1):
        if n <= default_cap(k):
            total += 2 ** (k + 1) if k < 2 else hk_degree(PipelineConfig(k=k, c=C, certify=False))
    return total


def test_criterion_6_list_size(demo, acceptance):
    m, _ = demo
    rng = random.Random(6)
    lengths = list(range(4, 65))
    mismatches = 0
    sizes, bounds = [], []
    for n in lengths:
        x = "".join(rng.choice("01") for _ in range(n))
        expected = 1 + sum(2**ell for ell in range(n) if 2**ell < n) + _degree_sum(m, x)
        lst = m.list_of(x)
        fx = m.f(x)
        mismatches += len(lst) != expected or len(fx) > expected
        sizes.append(len(fx))
        bounds.append(_extended_bound(n))
    logn = np.log(lengths)
    slope_f = np.polyfit(logn, np.log(sizes), 1)[0]
    slope_b = np.polyfit(logn, np.log(bounds), 1)[0]
    ok = mismatches == 0
    detail = (
        f"{len(lengths)} lengths 4..64, {mismatches} count mismatches; log-log slope |f(x)| {slope_f:.2f} "
        f"(built graphs up to k=4), degree-sum bound {slope_b:.2f} (pipeline degree at every k); reported, not asserted"
    )
    assert acceptance(6, "list-size audit", ok, detail)


def test_criterion_7_oracle_consistency(demo, acceptance):
    m, corpus = demo
    wit_total = wit_bad = 0
    for x in corpus:
        rec = brute_force_C(m, x, len(x) + 3)
        wit_total += 1
        wit_bad += rec.witness is None or m.eval_U(rec.witness) != x

    fail_total = fail_bad = 0
    saved = kernels.backend
    try:
        for name in kernels.available():
            kernels.backend = kernels.get_backend(name)
            for i in range(100):
                g = random_regular_graph(UniverseSpec.single(4), UniverseSpec.single(3), RandomGraphSeed(i, 2))
                for budget in (Budget(mode="exhaustive"), Budget(mode="sampled", samples=500, restarts=10, seed=i)):
                    cert = check_expander(g, 3, 7, budget)
                    if not cert.passed:
                        fail_total += 1
                        fail_bad += not recheck_witness(g, cert)
    finally:
        kernels.backend = saved
    ok = wit_bad == 0 and fail_bad == 0 and fail_total > 0
    detail = f"{wit_total} complexity witnesses, {wit_bad} bad; {fail_total} failure witnesses ({', '.join(kernels.available())}), {fail_bad} bad"
    assert acceptance(7, "oracle self-consistency", ok, detail)
