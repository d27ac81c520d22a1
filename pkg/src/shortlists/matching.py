"""Greedy online matching with discards."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Optional, Sequence

from .bits import BitLabel, LabelError
from .graph import BipartiteGraph

MATCHED = "matched"
DISCARDED = "discarded"
DUPLICATE = "duplicate-ignored"


class MatchOutcome(NamedTuple):
    status: str
    right: Optional[BitLabel] = None


class MatchSession:
    """State of one online run.  Each request is decided on arrival; nothing is buffered."""

    def __init__(self, graph: BipartiteGraph) -> None:
        self.graph = graph
        self.occupied: dict[BitLabel, BitLabel] = {}
        self.matched: dict[BitLabel, BitLabel] = {}
        self.discarded: list[BitLabel] = []
        self._discarded_set: set[BitLabel] = set()
        self.requests_seen = 0

    def request(self, x: BitLabel) -> MatchOutcome:
        if x not in self.graph.left:
            raise LabelError(f"{x!r} is not in the left universe")
        self.requests_seen += 1
        if x in self.matched or x in self._discarded_set:
            return MatchOutcome(DUPLICATE, self.matched.get(x))
        for r in self.graph.neighbors(x):
            if r not in self.occupied:
                self.occupied[r] = x
                self.matched[x] = r
                return MatchOutcome(MATCHED, r)
        self.discarded.append(x)
        self._discarded_set.add(x)
        return MatchOutcome(DISCARDED)

    def run(self, stream: Iterable[BitLabel]) -> list[MatchOutcome]:
        return [self.request(x) for x in stream]

    @property
    def distinct_requests(self) -> int:
        return len(self.matched) + len(self.discarded)

    def owner(self, r: BitLabel) -> Optional[BitLabel]:
        return self.occupied.get(r)


@dataclass
class MatchReport:
    streams: int
    max_discards: int
    bound: int
    passed: bool
    requests: int = 0
    discards_per_stream: list[int] = field(default_factory=list)
    violating_stream: Optional[list[BitLabel]] = None

    def to_json(self) -> dict:
        d = {
            "streams": self.streams,
            "requests": self.requests,
            "max_discards": self.max_discards,
            "bound": self.bound,
            "pass": self.passed,
        }
        if self.violating_stream is not None:
            d["violating_stream"] = self.violating_stream
        return d


def discard_bound_check(
    g: BipartiteGraph, A: int, B: int, request_streams: Iterable[Sequence[BitLabel]]
) -> MatchReport:
    """Run each stream in a fresh session; in an (A, B)-expander every stream of
    at most B distinct requests must see fewer than A discards."""
    report = MatchReport(streams=0, max_discards=0, bound=A, passed=True)
    for stream in request_streams:
        stream = list(stream)
        if len(set(stream)) > B:
            raise ValueError(f"stream has {len(set(stream))} distinct requests, more than B = {B}")
        s = MatchSession(g)
        s.run(stream)
        n = len(s.discarded)
        report.streams += 1
        report.requests += len(stream)
        report.discards_per_stream.append(n)
        report.max_discards = max(report.max_discards, n)
        if n >= A and report.passed:
            report.passed = False
            report.violating_stream = stream
    return report


def random_streams(g: BipartiteGraph, count: int, size: int, seed: int = 0) -> list[list[BitLabel]]:
    """``count`` streams of ``size`` distinct left labels in random order."""
    rng = random.Random(seed)
    n = g.left.cardinality()
    if size > n:
        raise ValueError(f"stream size {size} exceeds left size {n}")
    return [[g.left.label_at(i) for i in rng.sample(range(n), size)] for _ in range(count)]
