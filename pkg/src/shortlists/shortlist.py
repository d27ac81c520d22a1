"""Toy standard machine U, decompressor V, and the list generator f.

U dispatches on its first bit: ``0q`` runs the finite base table on ``q`` and
``1v`` runs V on ``v``, so the translator from V to U is ``t(v) = "1" + v``.
V has three clauses:

* ``00p`` outputs ``p``;
* ``01p`` outputs ``U(p)`` when ``|U(p)| > 2**|p|``;
* ``1p`` (with ``k = |p| - 1``) replays the shared per-k session: outputs of
  length-k U-programs, in dovetail order, are fed to online matching on H_k,
  and ``p`` decodes to whichever string got matched to it.

Every computation has a deterministic step cost; anything costing more than
``step_budget`` diverges (returns ``None``).  A string x then gets the list
f(x) of U-programs, one of which is within 3 bits of a shortest program for x
whenever x is in the range the desk-scale H_k family covers.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Iterator, Optional

from .bits import BitLabel, bit_width, check_label, strings_of_length
from .combinators import PipelineConfig, build_hk, default_cap, small_hk
from .graph import BipartiteGraph
from .matching import MATCHED, MatchSession
from .verify import Budget

log = logging.getLogger(__name__)

#: bits added by the translator t
TRANSLATOR_OVERHEAD = 1


class MachineFormatError(ValueError):
    pass


@dataclass
class MachineTable:
    entries: dict[BitLabel, tuple[BitLabel, int]] = field(default_factory=dict)

    def __post_init__(self) -> None:
        for q, (x, steps) in self.entries.items():
            check_label(q)
            check_label(x)
            if steps < 1:
                raise ValueError(f"program {q!r}: steps must be >= 1")

    @property
    def max_prog_len(self) -> int:
        return max((len(q) for q in self.entries), default=0)

    def __len__(self) -> int:
        return len(self.entries)

    def lookup(self, q: BitLabel) -> Optional[tuple[BitLabel, int]]:
        return self.entries.get(q)


class HkFamily:
    """The graphs H_k for 0 <= k <= k_max, built lazily.

    Below ``pipeline_min_k`` H_k is the complete graph from lengths k..cap(k)
    onto {0,1}^(k+1); from there on it comes from the certified pipeline.
    Above ``k_max`` there is no graph and clause 3 diverges.
    """

    def __init__(
        self,
        k_max: int = 4,
        c: int = 2,
        seed: int = 0,
        pipeline_min_k: int = 2,
        budget: Budget | None = None,
        certify: bool = True,
        provider: str = "random",
        lam: int = 1,
        alpha: int = 1,
    ) -> None:
        self.k_max = k_max
        self.c = c
        self.seed = seed
        self.pipeline_min_k = max(2, pipeline_min_k)
        self.budget = budget or Budget()
        self.certify = certify
        self.provider = provider
        self.lam = lam
        self.alpha = alpha
        self._graphs: dict[int, BipartiteGraph] = {}

    def cap(self, k: int) -> int:
        return default_cap(k)

    def bound(self, k: int) -> int:
        """Discard bound ceil(K / c^2) for K = 2^k requests."""
        return -(-(1 << k) // (self.c * self.c))

    def config(self, k: int) -> PipelineConfig:
        return PipelineConfig(
            k=k,
            c=self.c,
            left_len_cap=self.cap(k),
            provider=self.provider,
            seed=self.seed,
            lam=self.lam,
            alpha=self.alpha,
            budget=self.budget,
            certify=self.certify,
        )

    def graph(self, k: int) -> Optional[BipartiteGraph]:
        if k < 0 or k > self.k_max:
            return None
        g = self._graphs.get(k)
        if g is None:
            if k < self.pipeline_min_k:
                g = small_hk(k, self.cap(k))
            else:
                log.info("building H_%d", k)
                g = build_hk(self.config(k))
            self._graphs[k] = g
        return g

    def manifest(self) -> dict:
        return {
            "k_max": self.k_max,
            "c": self.c,
            "seed": self.seed,
            "pipeline_min_k": self.pipeline_min_k,
            "provider": self.provider,
            "caps": {str(k): self.cap(k) for k in range(self.k_max + 1)},
        }


@dataclass
class Session:
    """Memoized clause-3 computation for one k."""

    k: int
    requests: list[BitLabel]
    decoded: dict[BitLabel, tuple[BitLabel, int]]
    discarded: list[BitLabel]
    bound: int
    log: list[tuple[BitLabel, BitLabel, int, str]]


class StandardMachine:
    def __init__(self, base: MachineTable, family: HkFamily | None = None, step_budget: int = 10_000) -> None:
        self.base = base
        self.family = family if family is not None else HkFamily()
        self.step_budget = step_budget
        self._u: dict[BitLabel, tuple[Optional[BitLabel], int]] = {}
        self._sessions: dict[int, Optional[Session]] = {}
        self._by_length: dict[int, dict[BitLabel, BitLabel]] = {}

    # -- raw evaluation: (output or None, cost) -------------------------------

    def _run_u(self, p: BitLabel) -> tuple[Optional[BitLabel], int]:
        hit = self._u.get(p)
        if hit is not None:
            return hit
        if not p:
            res = (None, 1)
        elif p[0] == "0":
            entry = self.base.lookup(p[1:])
            res = (None, 1) if entry is None else (entry[0], 1 + entry[1])
        else:
            x, cost = self._run_v(p[1:])
            res = (x, 1 + cost)
        if res[0] is not None and res[1] > self.step_budget:
            res = (None, res[1])
        self._u[p] = res
        return res

    def _run_v(self, w: BitLabel) -> tuple[Optional[BitLabel], int]:
        if w.startswith("00"):
            p = w[2:]
            return p, 1 + len(p)
        if w.startswith("01"):
            p = w[2:]
            x, cost = self._run_u(p)
            if x is not None and len(x) > (1 << len(p)):
                return x, 1 + cost
            return None, 1 + cost
        if w.startswith("1"):
            p = w[1:]
            s = self.session(len(p) - 1)
            if s is None or p not in s.decoded:
                return None, 1
            x, halt = s.decoded[p]
            return x, 1 + halt
        return None, 1

    # -- public evaluation -------------------------------------------------------

    def eval_U(self, p: BitLabel) -> Optional[BitLabel]:
        """Output of U on ``p``, or ``None`` if it diverges within the step budget."""
        x, cost = self._run_u(p)
        return x if cost <= self.step_budget else None

    def eval_V(self, w: BitLabel) -> Optional[BitLabel]:
        x, cost = self._run_v(w)
        return x if x is not None and cost <= self.step_budget else None

    def cost_U(self, p: BitLabel) -> int:
        return self._run_u(p)[1]

    def t(self, v: BitLabel) -> BitLabel:
        return "1" + v

    # -- clause 3 ---------------------------------------------------------------

    def enumerate_outputs(self, k: int) -> Iterator[tuple[BitLabel, BitLabel, int]]:
        """Distinct outputs of length-k U-programs as (x, q, halting step), in dovetail order.

        Dovetailing all 2^k programs round by round observes each halting
        computation at its step count; ties within a round go to the
        lexicographically smaller program.
        """
        halts = []
        for q in strings_of_length(k):
            x, cost = self._run_u(q)
            if x is not None and cost <= self.step_budget:
                halts.append((cost, q, x))
        halts.sort()
        seen: set[BitLabel] = set()
        for cost, q, x in halts:
            if x not in seen:
                seen.add(x)
                yield x, q, cost

    def session(self, k: int) -> Optional[Session]:
        if k in self._sessions:
            return self._sessions[k]
        g = self.family.graph(k) if k >= 0 else None
        if g is None:
            self._sessions[k] = None
            return None
        hi = min(1 << k, self.family.cap(k))
        ms = MatchSession(g)
        s = Session(k=k, requests=[], decoded={}, discarded=ms.discarded, bound=self.family.bound(k), log=[])
        for x, q, halt in self.enumerate_outputs(k):
            if not k <= len(x) <= hi:
                continue
            s.requests.append(x)
            out = ms.request(x)
            s.log.append((x, q, halt, out.status))
            if out.status == MATCHED:
                s.decoded[out.right] = (x, halt)
        self._sessions[k] = s
        return s

    # -- lists ----------------------------------------------------------------------

    def hk_range(self, x: BitLabel) -> range:
        n = len(x)
        return range(bit_width(n), min(n, self.family.k_max) + 1)

    def list_of(self, x: BitLabel) -> list[BitLabel]:
        """00x, every 01p with 2^|p| < |x|, and 1r for each H_k neighbor r of x (k from |x| down)."""
        check_label(x)
        n = len(x)
        if n == 0:
            raise ValueError("empty string has trivial program")
        out = ["00" + x]
        ell = 0
        while (1 << ell) < n:
            out.extend("01" + p for p in strings_of_length(ell))
            ell += 1
        for k in reversed(self.hk_range(x)):
            g = self.family.graph(k)
            if g is not None and x in g.left:
                out.extend("1" + r for r in g.neighbors(x))
        return out

    def f(self, x: BitLabel) -> list[BitLabel]:
        return list(dict.fromkeys(self.t(v) for v in self.list_of(x)))

    def best_in_list(self, x: BitLabel) -> Optional[BitLabel]:
        """Shortest (then lexicographically first) program in f(x) that outputs x."""
        good = [p for p in self.f(x) if self.eval_U(p) == x]
        return min(good, key=lambda p: (len(p), p)) if good else None

    # -- brute force oracle ----------------------------------------------------------

    def outputs_of_length(self, L: int) -> dict[BitLabel, BitLabel]:
        """output -> lexicographically first length-L program producing it."""
        table = self._by_length.get(L)
        if table is None:
            table = {}
            for p in strings_of_length(L):
                x = self.eval_U(p)
                if x is not None and x not in table:
                    table[x] = p
            self._by_length[L] = table
        return table

    def in_theorem_range(self, x: BitLabel, c_u: int) -> bool:
        n = len(x)
        return bit_width(n) <= c_u <= min(n, self.family.k_max) and n <= self.family.cap(c_u)


@dataclass
class ComplexityRecord:
    x: BitLabel
    C_U: Optional[int]
    witness: Optional[BitLabel]
    steps: Optional[int]
    max_len: int

    @property
    def found(self) -> bool:
        return self.C_U is not None


def eval_U(m: StandardMachine, p: BitLabel) -> Optional[BitLabel]:
    return m.eval_U(p)


def eval_V(m: StandardMachine, w: BitLabel) -> Optional[BitLabel]:
    return m.eval_V(w)


def enumerate_outputs(m: StandardMachine, k: int) -> Iterator[tuple[BitLabel, BitLabel]]:
    for x, q, _ in m.enumerate_outputs(k):
        yield x, q


def list_of(m: StandardMachine, x: BitLabel) -> list[BitLabel]:
    return m.list_of(x)


def f(m: StandardMachine, x: BitLabel) -> list[BitLabel]:
    return m.f(x)


def brute_force_C(m: StandardMachine, x: BitLabel, max_len: int) -> ComplexityRecord:
    """Shortest program for ``x`` among all programs of length <= max_len (ties: lexicographic).

    ``C_U`` is ``None`` when nothing that short outputs ``x``.
    """
    check_label(x)
    for L in range(max_len + 1):
        p = m.outputs_of_length(L).get(x)
        if p is not None:
            return ComplexityRecord(x, L, p, m.cost_U(p), max_len)
    return ComplexityRecord(x, None, None, None, max_len)


def shortlist_report(m: StandardMachine, x: BitLabel, max_len: int | None = None) -> dict:
    """One report row: complexity, list size, best program in the list and its slack."""
    if max_len is None:
        max_len = len(x) + 3
    rec = brute_force_C(m, x, max_len)
    fx = m.f(x)
    best = m.best_in_list(x)
    discards = {}
    for k in m.hk_range(x):
        s = m.session(k)
        if s is not None:
            discards[str(k)] = len(s.discarded)
    row = {
        "x": x,
        "C_U": rec.C_U,
        "witness": rec.witness,
        "list_size": len(fx),
        "best_in_list": best,
        "best_len": None if best is None else len(best),
        "slack": None if best is None or rec.C_U is None else len(best) - rec.C_U,
        "in_range": rec.C_U is not None and m.in_theorem_range(x, rec.C_U),
        "discards_per_k": discards,
    }
    return row
