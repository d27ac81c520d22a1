"""Graph algebra (union, padding, replication, prefix merge, product) and the H_k pipeline.

The pipeline composes

    G_k = pad(shifted_union(block_k, ..., block_cap))     left: lengths k..cap
    F_k = prefix_merge(replicate_right(disperser), k+1)   right: {0,1}^(k+1)
    H_k = product(G_k, F_k)

Blocks and dispersers come from a provider ("random": seeded random graphs
certified by brute force, resampled on failure; "complete": complete graphs).
"""

from __future__ import annotations

import hashlib
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .bits import BitLabel, LabelError, UniverseSpec, bit_width, from_int
from .graph import BipartiteGraph, CompleteGraph, GraphError, RandomGraph, RandomGraphSeed
from .verify import Budget, check_disperser, check_expander

log = logging.getLogger(__name__)


class CombinatorError(ValueError):
    pass


class CertificationError(RuntimeError):
    def __init__(self, message: str, block: str, certificate=None) -> None:
        super().__init__(message)
        self.block = block
        self.certificate = certificate


def _merged_left(parts: Sequence[BipartiteGraph]) -> UniverseSpec:
    if all(p.left.members is None for p in parts):
        spans = sorted((p.left.min_len, p.left.max_len) for p in parts)
        contiguous = all(spans[i][1] + 1 == spans[i + 1][0] for i in range(len(spans) - 1))
        if contiguous:
            return UniverseSpec.lengths(spans[0][0], spans[-1][1])
    return UniverseSpec.explicit(x for p in parts for x in p.left)


class ShiftedUnion(BipartiteGraph):
    kind = "shifted-union"

    def __init__(self, parts: Sequence[BipartiteGraph]) -> None:
        parts = list(parts)
        if not parts:
            raise CombinatorError("union of zero graphs")
        for i in range(len(parts)):
            for j in range(i + 1, len(parts)):
                if parts[i].left.overlaps(parts[j].left):
                    raise CombinatorError("union requires disjoint lefts")
        self.parts = parts
        self.offsets = []
        total = 0
        for p in parts:
            self.offsets.append(total)
            total += p.right.cardinality()
        self.width = bit_width(total)
        right = UniverseSpec.explicit(from_int(v, self.width) for v in range(total))
        super().__init__(_merged_left(parts), right)

    def part_of(self, x: BitLabel) -> int:
        for i, p in enumerate(self.parts):
            if x in p.left:
                return i
        raise LabelError(f"{x!r} is not a left node")

    def _compute_neighbors(self, x):
        i = self.part_of(x)
        p, off = self.parts[i], self.offsets[i]
        return tuple(from_int(off + p.right.index(r), self.width) for r in p.neighbors(x))

    def params(self):
        return {"offsets": self.offsets, "parts": [p.manifest() for p in self.parts]}


def shifted_union(parts: Sequence[BipartiteGraph]) -> ShiftedUnion:
    return ShiftedUnion(parts)


def pad_label(r: BitLabel, target_len: int) -> BitLabel:
    if len(r) >= target_len:
        raise CombinatorError(f"pad target too small: |{r}| = {len(r)} >= {target_len}")
    return r + "1" + "0" * (target_len - len(r) - 1)


class PaddedGraph(BipartiteGraph):
    kind = "padded"

    def __init__(self, g: BipartiteGraph, target_len: int) -> None:
        if g.right.max_len >= target_len:
            raise CombinatorError(f"pad target too small: labels of length {g.right.max_len} >= {target_len}")
        self.base = g
        self.target_len = target_len
        super().__init__(g.left, UniverseSpec.explicit(pad_label(r, target_len) for r in g.right))
        self.certificates = list(g.certificates)

    def _compute_neighbors(self, x):
        return tuple(pad_label(r, self.target_len) for r in self.base.neighbors(x))

    def params(self):
        return {"target_len": self.target_len, "base": self.base.manifest()}


def pad_right_labels(g: BipartiteGraph, target_len: int) -> PaddedGraph:
    return PaddedGraph(g, target_len)


class ReplicatedGraph(BipartiteGraph):
    """Right side = ``copies`` tagged copies; label of copy j of r is r followed by j in binary."""

    kind = "replicated"

    def __init__(self, g: BipartiteGraph, copies: int) -> None:
        if copies < 1:
            raise CombinatorError("copies must be >= 1")
        self.base = g
        self.copies = copies
        self.tag_width = bit_width(copies)
        self._tags = [from_int(j, self.tag_width) for j in range(copies)]
        if g.right.members is None and copies == 1 << self.tag_width:
            right = UniverseSpec.lengths(g.right.min_len + self.tag_width, g.right.max_len + self.tag_width)
        else:
            right = UniverseSpec.explicit(r + t for t in self._tags for r in g.right)
        super().__init__(g.left, right)

    def _compute_neighbors(self, x):
        nb = self.base.neighbors(x)
        return tuple(r + t for t in self._tags for r in nb)

    def params(self):
        return {"copies": self.copies, "base": self.base.manifest()}


def replicate_right(g: BipartiteGraph, copies: int) -> ReplicatedGraph:
    return ReplicatedGraph(g, copies)


class PrefixMergedGraph(BipartiteGraph):
    kind = "prefix-merged"

    def __init__(self, g: BipartiteGraph, prefix_len: int) -> None:
        if g.right.min_len < prefix_len:
            raise CombinatorError(f"right labels shorter than prefix length {prefix_len}")
        self.base = g
        self.prefix_len = prefix_len
        super().__init__(g.left, UniverseSpec.single(prefix_len))

    def _compute_neighbors(self, x):
        p = self.prefix_len
        return tuple(r[:p] for r in self.base.neighbors(x))

    def params(self):
        return {"prefix_len": self.prefix_len, "base": self.base.manifest()}


def prefix_merge(g: BipartiteGraph, prefix_len: int) -> PrefixMergedGraph:
    return PrefixMergedGraph(g, prefix_len)


class ProductGraph(BipartiteGraph):
    kind = "product"

    def __init__(self, g: BipartiteGraph, f: BipartiteGraph) -> None:
        missing = next((z for z in g.right if z not in f.left), None)
        if missing is not None:
            raise CombinatorError(f"product interface mismatch: {missing!r} not in left of second graph")
        self.first = g
        self.second = f
        super().__init__(g.left, f.right)

    def _compute_neighbors(self, x):
        f = self.second
        out: list[BitLabel] = []
        for z in self.first.neighbors(x):
            out.extend(f.neighbors(z))
        return tuple(out)

    def params(self):
        return {"first": self.first.manifest(), "second": self.second.manifest()}


def product(g: BipartiteGraph, f: BipartiteGraph) -> ProductGraph:
    return ProductGraph(g, f)


# --- parameter envelopes -----------------------------------------------------


@dataclass(frozen=True)
class GuvParams:
    n: int
    k: int
    lam: int
    D: int
    M_bound: int
    expansion: tuple[tuple[int, int], ...]

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "k": self.k,
            "lambda": self.lam,
            "D": self.D,
            "M_bound": self.M_bound,
            "expansion": [list(e) for e in self.expansion],
        }


def guv_envelope(n: int, k: int, lam: int = 1) -> GuvParams:
    """Degree lam*(n*k)^2, right size at most D^2*K^2, (K', D*K'/2) expansion for K' <= K."""
    if k > n:
        raise ValueError("need k <= n")
    if lam < 1:
        raise ValueError("lambda must be >= 1")
    D = lam * (n * k) ** 2
    K = 1 << k
    table = tuple((1 << j, math.ceil(D * (1 << j) / 2)) for j in range(k + 1))
    return GuvParams(n, k, lam, D, D * D * K * K, table)


@dataclass(frozen=True)
class FkParams:
    k: int
    left_len: int
    right_len: int
    alpha: int
    disperser_degree: int
    disperser_right_len: int
    copies: int
    copies_envelope: int
    degree: int

    def to_json(self) -> dict:
        return dict(self.__dict__)


def _pow2_at_least(v: int) -> int:
    return 1 << bit_width(max(1, v))


def fk_params(k: int, disperser_degree: int, disperser_right_len: int, alpha: int = 1, left_len: int | None = None) -> FkParams:
    """Desk-scale F_k parameters next to the asymptotic replication count 2*ceil((8k)^3/(alpha*D)).

    The desk copy count is 2*ceil(K/|R|) (the same quantity, since the
    disperser right size is alpha*K*D/(8k)^3), rounded up to a power of two
    so every prefix class has the same size.
    """
    K = 1 << k
    R = 1 << disperser_right_len
    copies = _pow2_at_least(2 * math.ceil(K / R))
    envelope = 2 * math.ceil((8 * k) ** 3 / (alpha * disperser_degree))
    return FkParams(
        k=k,
        left_len=8 * k if left_len is None else left_len,
        right_len=k + 1,
        alpha=alpha,
        disperser_degree=disperser_degree,
        disperser_right_len=disperser_right_len,
        copies=copies,
        copies_envelope=envelope,
        degree=disperser_degree * copies,
    )


def default_cap(k: int) -> int:
    return min(1 << k, k + 3)


@dataclass
class PipelineConfig:
    k: int
    c: int = 2
    left_len_cap: Optional[int] = None
    provider: str = "random"
    seed: int = 0
    seeds: dict[str, int] = field(default_factory=dict)
    lam: int = 1
    alpha: int = 1
    block_degree: Optional[int] = None
    fk_right_len: Optional[int] = None
    fk_degree: Optional[int] = None
    max_attempts: int = 20
    budget: Budget = field(default_factory=Budget)
    certify: bool = True

    def __post_init__(self) -> None:
        if self.c < 2:
            raise ValueError("c must be >= 2")
        if self.k < 2:
            raise ValueError("k must be >= 2")
        if self.left_len_cap is None:
            self.left_len_cap = default_cap(self.k)
        if not self.k <= self.left_len_cap <= 1 << self.k:
            raise ValueError(f"cap {self.left_len_cap} outside [k, 2^k] = [{self.k}, {1 << self.k}]")
        if self.provider not in ("random", "complete"):
            raise ValueError(f"unknown provider {self.provider!r}")

    @property
    def cap(self) -> int:
        return self.left_len_cap

    @property
    def K(self) -> int:
        return 1 << self.k

    @property
    def A(self) -> int:
        """Subset size that must expand to K: ceil(K / c^2)."""
        return -(-self.K // (self.c * self.c))

    @property
    def D_block(self) -> int:
        return self.block_degree or 2 * self.c * self.c

    @property
    def block_right_len(self) -> int:
        # room for every A-subset to reach c^2 * |subset| distinct neighbors with slack
        return bit_width(2 * self.c * self.c * self.K)

    @property
    def m_F(self) -> int:
        return self.fk_right_len if self.fk_right_len is not None else self.k + 1

    @property
    def d_F(self) -> int:
        return self.fk_degree or min(1 << (self.m_F - 1), 8)

    def seed_for(self, name: str, attempt: int = 0) -> int:
        if name in self.seeds and attempt == 0:
            return self.seeds[name]
        h = hashlib.blake2b(f"{self.seed}:{name}:{attempt}".encode(), digest_size=8).digest()
        return int.from_bytes(h, "big")

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "c": self.c,
            "cap": self.cap,
            "lambda": self.lam,
            "alpha": self.alpha,
            "provider": self.provider,
            "seed": self.seed,
            "seeds": dict(sorted(self.seeds.items())),
            "block_degree": self.D_block,
            "fk_right_len": self.m_F,
            "fk_degree": self.d_F,
            "budget": self.budget.to_json(),
        }


def _certified(cfg: PipelineConfig, name: str, make, checks):
    """Build with successive seeds until every check passes."""
    last = None
    for attempt in range(cfg.max_attempts):
        seed = cfg.seed_for(name, attempt)
        g = make(seed)
        if not cfg.certify:
            return g
        certs = []
        ok = True
        for check in checks:
            cert = check(g)
            certs.append(cert)
            if not cert.passed:
                ok, last = False, cert
                break
        if ok:
            g.certificates.extend(certs)
            if cfg.provider == "random":
                cfg.seeds[name] = seed
            return g
        log.info("block %s failed certification on attempt %d, resampling", name, attempt)
        if cfg.provider == "complete":
            break
    raise CertificationError(f"block {name} failed certification after {cfg.max_attempts} attempts", name, last)


def guv_block(cfg: PipelineConfig, n: int) -> BipartiteGraph:
    """Desk-scale stand-in for GUV_{n,k}: every s-subset with s <= A reaches c^2*s neighbors."""
    left = UniverseSpec.single(n)
    right = UniverseSpec.single(cfg.block_right_len)
    c2 = cfg.c * cfg.c
    sizes = [s for s in range(1, cfg.A + 1) if s <= left.cardinality()]
    checks = [lambda g, s=s: check_expander(g, s, c2 * s, cfg.budget) for s in sizes]

    def make(seed):
        if cfg.provider == "complete":
            return CompleteGraph(left, right)
        return RandomGraph(left, right, RandomGraphSeed(seed, cfg.D_block))

    return _certified(cfg, f"guv[n={n}]", make, checks)


def right_size_audit(cfg: PipelineConfig, blocks: Sequence[BipartiteGraph]) -> dict:
    """Compare right-set sizes against the GUV envelope sum and the K^7 / K^8 bounds."""
    k, K, lam = cfg.k, cfg.K, cfg.lam
    full = sum(guv_envelope(n, k, lam).M_bound for n in range(k, (1 << k) + 1))
    capped = sum(guv_envelope(n, k, lam).M_bound for n in range(k, cfg.cap + 1))
    bound = lam * lam * k**4 * K**7
    desk = sum(b.right.cardinality() for b in blocks)
    return {
        "envelope_sum_full_range": full,
        "envelope_sum_capped": capped,
        "bound_lambda2_k4_K7": bound,
        "K8": K**8,
        "envelope_within_bound": full <= bound,
        "bound_below_K8": bound < K**8,
        "desk_right_size": desk,
        "desk_within_envelope": desk <= capped,
    }


class PipelineGraph(BipartiteGraph):
    """Thin wrapper naming a pipeline stage; delegates the oracle to ``inner``."""

    def __init__(self, kind: str, inner: BipartiteGraph, cfg: PipelineConfig, extra: dict | None = None) -> None:
        self.kind = kind
        self.inner = inner
        self.config = cfg
        self.extra = extra or {}
        super().__init__(inner.left, inner.right)
        self._cache = inner._cache

    def neighbors(self, x):
        return self.inner.neighbors(x)

    def _compute_neighbors(self, x):
        return self.inner.neighbors(x)

    def params(self):
        d = {"config": self.config.to_json()}
        d.update(self.extra)
        d["structure"] = self.inner.manifest()
        return d


def gk_right_len(cfg: PipelineConfig, total_right: int) -> int:
    """Smallest padded length holding every shifted block plus the pad bit, and > k+1."""
    return max(bit_width(total_right) + 1, cfg.k + 2)


def build_gk(cfg: PipelineConfig) -> PipelineGraph:
    blocks = [guv_block(cfg, n) for n in range(cfg.k, cfg.cap + 1)]
    union = shifted_union(blocks)
    len_R = gk_right_len(cfg, union.right.cardinality())
    padded = pad_right_labels(union, len_R)
    extra = {"right_len": len_R, "audit": right_size_audit(cfg, blocks)}
    return PipelineGraph("gk", padded, cfg, extra)


def build_fk(cfg: PipelineConfig, left_len: int) -> PipelineGraph:
    """(K, 1/2)-disperser, replicated to at least 2K right nodes, merged to k+1 bits."""
    k, K = cfg.k, cfg.K
    if left_len <= k + 1:
        raise CombinatorError(f"F_k left length {left_len} must exceed k+1 = {k + 1}")
    params = fk_params(k, cfg.d_F, cfg.m_F, cfg.alpha, left_len)
    left = UniverseSpec.single(left_len)
    right = UniverseSpec.single(cfg.m_F)

    def make(seed):
        if cfg.provider == "complete":
            return CompleteGraph(left, right)
        return RandomGraph(left, right, RandomGraphSeed(seed, cfg.d_F))

    disperser = _certified(
        cfg,
        f"disperser[k={k}]",
        make,
        [lambda g: check_disperser(g, K, Fraction(1, 2), cfg.budget)],
    )
    merged = prefix_merge(replicate_right(disperser, params.copies), k + 1)
    if cfg.certify:
        cert = check_expander(merged, K, K, cfg.budget)
        if not cert.passed:
            raise CertificationError(f"F_{k} is not a ({K},{K})-expander", f"fk[k={k}]", cert)
        merged.certificates.append(cert)
    return PipelineGraph("fk", merged, cfg, {"params": params.to_json()})


def build_hk(cfg: PipelineConfig) -> PipelineGraph:
    gk = build_gk(cfg)
    fk = build_fk(cfg, gk.extra["right_len"])
    hk = product(gk, fk)
    out = PipelineGraph("hk", hk, cfg, {"A": cfg.A, "K": cfg.K})
    if cfg.certify:
        cert = check_expander(out, cfg.A, cfg.K, cfg.budget)
        if not cert.passed:
            raise CertificationError(f"H_{cfg.k} is not a ({cfg.A},{cfg.K})-expander", f"hk[k={cfg.k}]", cert)
        out.certificates.append(cert)
    return out


def hk_degree(cfg: PipelineConfig) -> int:
    """Left degree of H_k (with multiplicity) from the parameters alone, without building it."""
    if cfg.provider == "complete":
        raise ValueError("complete blocks have no fixed degree formula")
    copies = fk_params(cfg.k, cfg.d_F, cfg.m_F, cfg.alpha).copies
    return cfg.D_block * cfg.d_F * copies


def small_hk(k: int, cap: int) -> CompleteGraph:
    """Fallback H_k for tiny k: complete graph from lengths k..cap onto {0,1}^(k+1)."""
    return CompleteGraph(UniverseSpec.lengths(k, cap), UniverseSpec.single(k + 1))
