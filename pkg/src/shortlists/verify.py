"""Exhaustive and sampled certification of expansion and dispersion.

Mode selection: if C(|L|, K) fits in ``Budget.exhaustive_limit`` every
K-subset is covered (with subtree pruning in the kernel), otherwise uniform
random K-subsets plus greedy adversarial subsets are tried.  Only an
exhaustive pass is a proof; certificates record which mode produced them.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from . import kernels
from .bits import BitLabel
from .graph import BipartiteGraph


@dataclass
class Budget:
    exhaustive_limit: int = 10**7
    samples: int = 10**5
    restarts: int = 10**3
    seed: int = 0
    mode: Optional[str] = None  # force "exhaustive" or "sampled"

    def __post_init__(self) -> None:
        if self.mode not in (None, "auto", "exhaustive", "sampled"):
            raise ValueError(f"unknown check mode {self.mode!r}")
        if self.mode == "auto":
            self.mode = None

    def to_json(self) -> dict:
        return {
            "exhaustive_limit": self.exhaustive_limit,
            "samples": self.samples,
            "restarts": self.restarts,
            "seed": self.seed,
            "mode": self.mode or "auto",
        }


@dataclass
class _Certificate:
    subset_size: int
    mode: str
    passed: bool
    graph_fingerprint: str
    threshold: int
    subsets_total: int
    samples: int = 0
    restarts: int = 0
    witness: list[BitLabel] = field(default_factory=list)
    witness_neighbors: Optional[int] = None
    min_observed: Optional[int] = None
    visited: int = 0

    @property
    def definitive(self) -> bool:
        return self.mode == "exhaustive" or not self.passed

    @property
    def result(self) -> str:
        return "pass" if self.passed else "fail"

    def _common_json(self) -> dict:
        d = {
            "subset_size": self.subset_size,
            "mode": self.mode,
            "result": self.result,
            "graph_fingerprint": self.graph_fingerprint,
            "subsets_total": self.subsets_total,
        }
        if self.mode != "exhaustive":
            d["samples"] = self.samples
            d["restarts"] = self.restarts
        if self.min_observed is not None:
            d["min_observed"] = self.min_observed
        if not self.passed:
            d["witness"] = list(self.witness)
            d["witness_neighbors"] = self.witness_neighbors
        return d


@dataclass
class ExpansionCertificate(_Certificate):
    required_neighbors: int = 0

    def to_json(self) -> dict:
        d = {"type": "expansion", "required_neighbors": self.required_neighbors}
        d.update(self._common_json())
        return d


@dataclass
class DispersionCertificate(_Certificate):
    delta: Fraction = Fraction(0)
    right_size: int = 0

    def to_json(self) -> dict:
        d = {
            "type": "dispersion",
            "delta": str(self.delta),
            "right_size": self.right_size,
            "required_neighbors": self.threshold,
        }
        d.update(self._common_json())
        return d


def certificate_from_json(d: dict) -> _Certificate:
    common = dict(
        subset_size=d["subset_size"],
        mode=d["mode"],
        passed=d["result"] == "pass",
        graph_fingerprint=d["graph_fingerprint"],
        threshold=d["required_neighbors"],
        subsets_total=d["subsets_total"],
        samples=d.get("samples", 0),
        restarts=d.get("restarts", 0),
        witness=list(d.get("witness", [])),
        witness_neighbors=d.get("witness_neighbors"),
        min_observed=d.get("min_observed"),
    )
    if d["type"] == "expansion":
        return ExpansionCertificate(required_neighbors=d["required_neighbors"], **common)
    return DispersionCertificate(delta=Fraction(d["delta"]), right_size=d["right_size"], **common)


def neighbor_masks(g: BipartiteGraph, left: Sequence[BitLabel] | None = None) -> list[int]:
    """One int per left node; bit j set iff the node touches the right node of rank j."""
    if left is None:
        left = list(g.enumerate_left())
    rank = g.right.index
    masks = []
    for x in left:
        m = 0
        for r in g.neighbors(x):
            m |= 1 << rank(r)
        masks.append(m)
    return masks


def count_neighbors(g: BipartiteGraph, subset: Sequence[BitLabel]) -> int:
    """Distinct-neighbor count by plain set union (independent of the kernels)."""
    seen: set[BitLabel] = set()
    for x in subset:
        seen.update(g.neighbors(x))
    return len(seen)


def sample_subsets(n: int, k: int, count: int, seed: int) -> np.ndarray:
    """``count`` uniformly random k-subsets of range(n), one per row (PCG64 stream)."""
    rng = np.random.default_rng(seed)
    if 2 * k > n:
        return np.argsort(rng.random((count, n)), axis=1)[:, :k]
    out = rng.integers(0, n, size=(count, k))
    while True:
        srt = np.sort(out, axis=1)
        bad = np.nonzero((srt[:, 1:] == srt[:, :-1]).any(axis=1))[0]
        if bad.size == 0:
            return out
        out[bad] = rng.integers(0, n, size=(bad.size, k))


def _search(g, K, threshold, budget):
    """Shared driver; returns the fields common to both certificate types."""
    budget = budget or Budget()
    left = list(g.enumerate_left())
    n = len(left)
    if not 1 <= K <= n:
        raise ValueError(f"subset size {K} outside [1, |L|={n}]")
    raw = neighbor_masks(g, left)
    be = kernels.backend
    masks = be.prepare(raw)
    total = math.comb(n, K)
    mode = budget.mode or ("exhaustive" if total <= budget.exhaustive_limit else "sampled")
    out = dict(
        subset_size=K,
        mode=mode,
        graph_fingerprint=g.fingerprint(),
        threshold=threshold,
        subsets_total=total,
    )
    if threshold <= 0:
        # vacuous bound; the kernel would read it as a request for the minimum
        out.update(passed=True)
        return out
    if mode == "exhaustive":
        count, wit, visited = be.search_union(masks, K, threshold)
        out.update(passed=count < 0, visited=visited)
        if count >= 0:
            out.update(witness=[left[i] for i in wit], witness_neighbors=count)
        return out

    subsets = sample_subsets(n, K, budget.samples, budget.seed)
    sizes = be.union_sizes(masks, subsets)
    best = min(range(len(sizes)), key=sizes.__getitem__) if sizes else None
    best_c = sizes[best] if sizes else None
    best_sub = subsets[best].tolist() if sizes else None

    starts = [min(range(n), key=lambda i: raw[i].bit_count())]
    rng = random.Random(budget.seed ^ 0x5EED)
    starts += [rng.randrange(n) for _ in range(max(0, budget.restarts - 1))]
    for s in dict.fromkeys(starts):
        sub, c = be.greedy_union(masks, K, s)
        if best_c is None or c < best_c:
            best_c, best_sub = c, list(sub)
    out.update(
        samples=budget.samples,
        restarts=budget.restarts,
        min_observed=best_c,
        passed=best_c >= threshold,
    )
    if best_c < threshold:
        out.update(witness=[left[i] for i in sorted(best_sub)], witness_neighbors=best_c)
    return out


def check_expander(
    g: BipartiteGraph, K: int, K_prime: int, budget: Budget | None = None
) -> ExpansionCertificate:
    """Is every K-subset of left nodes adjacent to at least ``K_prime`` right nodes?"""
    fields = _search(g, K, K_prime, budget)
    return ExpansionCertificate(required_neighbors=K_prime, **fields)


def dispersion_threshold(right_size: int, delta) -> int:
    return math.ceil((1 - Fraction(delta)) * right_size)


def check_disperser(
    g: BipartiteGraph, K: int, delta, budget: Budget | None = None
) -> DispersionCertificate:
    """Is every K-subset adjacent to at least (1 - delta)|R| right nodes?

    Checking subsets of size exactly K suffices: neighbor sets only grow
    with the subset.
    """
    delta = Fraction(delta)
    if not 0 <= delta < 1:
        raise ValueError("delta must lie in [0, 1)")
    R = g.right.cardinality()
    fields = _search(g, K, dispersion_threshold(R, delta), budget)
    return DispersionCertificate(delta=delta, right_size=R, **fields)


def min_neighbor_subset(g: BipartiteGraph, size: int) -> tuple[list[BitLabel], int]:
    """Greedy subset with few neighbors, grown from the lowest-degree left node."""
    left = list(g.enumerate_left())
    if not 1 <= size <= len(left):
        raise ValueError(f"subset size {size} outside [1, {len(left)}]")
    masks = neighbor_masks(g, left)
    start = min(range(len(left)), key=lambda i: masks[i].bit_count())
    sub, c = kernels.backend.greedy_union(masks, size, start)
    return [left[i] for i in sub], c


def exact_min_neighbors(g: BipartiteGraph, size: int) -> tuple[list[BitLabel], int]:
    """True minimum of |N(S)| over all ``size``-subsets (exhaustive, branch and bound)."""
    left = list(g.enumerate_left())
    masks = neighbor_masks(g, left)
    c, wit, _ = kernels.backend.search_union(masks, size, 0)
    return [left[i] for i in wit], c


def recheck_witness(g: BipartiteGraph, cert: _Certificate) -> bool:
    """A failing certificate's witness must really violate the bound."""
    if cert.passed:
        return True
    return len(set(cert.witness)) == cert.subset_size and count_neighbors(g, cert.witness) < cert.threshold
