"""Bipartite graphs given by neighbor oracles, and the base-graph providers."""

from __future__ import annotations

import hashlib
import json
import random
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Sequence

from .bits import BitLabel, LabelError, UniverseSpec, label_key

PRNG_DESCRIPTION = "random.Random(int(blake2b-128(b'<seed>:<label>'))).sample(range(|R|), degree)"


class GraphError(ValueError):
    pass


@dataclass(frozen=True)
class RandomGraphSeed:
    seed: int
    degree: int

    def __post_init__(self) -> None:
        if not 0 <= self.seed < 1 << 64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if self.degree < 1:
            raise ValueError("degree must be positive")


class BipartiteGraph:
    """Left/right universes plus a deterministic neighbor oracle.

    Subclasses implement ``_compute_neighbors(x)``; results are memoized, so
    the oracle is cheap to call repeatedly and safe for concurrent readers
    (a racing duplicate computation stores the same tuple).
    """

    kind = "abstract"

    def __init__(self, left: UniverseSpec, right: UniverseSpec) -> None:
        self.left = left
        self.right = right
        self.certificates: list = []
        self._cache: dict[BitLabel, tuple[BitLabel, ...]] = {}

    def _compute_neighbors(self, x: BitLabel) -> tuple[BitLabel, ...]:
        raise NotImplementedError

    def neighbors(self, x: BitLabel) -> tuple[BitLabel, ...]:
        try:
            return self._cache[x]
        except KeyError:
            pass
        if x not in self.left:
            raise LabelError(f"{x!r} is not a left node")
        nb = self._compute_neighbors(x)
        self._cache[x] = nb
        return nb

    def degree_of(self, x: BitLabel) -> int:
        return len(self.neighbors(x))

    def neighbor(self, x: BitLabel, i: int) -> BitLabel:
        nb = self.neighbors(x)
        if not 0 <= i < len(nb):
            raise IndexError(f"neighbor index {i} outside [0, {len(nb)})")
        return nb[i]

    def neighbor_set(self, x: BitLabel) -> frozenset[BitLabel]:
        return frozenset(self.neighbors(x))

    def enumerate_left(self) -> Iterator[BitLabel]:
        return iter(self.left)

    def edges(self) -> Iterator[tuple[BitLabel, BitLabel]]:
        for x in self.enumerate_left():
            for r in self.neighbors(x):
                yield x, r

    def params(self) -> dict:
        return {}

    def manifest(self, certificates: bool = True) -> dict:
        m = {
            "kind": self.kind,
            "left": self.left.to_json(),
            "right": self.right.to_json(),
        }
        m.update(self.params())
        if certificates and self.certificates:
            m["certificates"] = [c.to_json() for c in self.certificates]
        return m

    def fingerprint(self) -> str:
        """Hash of the manifest with every (nested) certificate removed."""
        blob = json.dumps(_strip_certificates(self.manifest(certificates=False)), sort_keys=True)
        return hashlib.sha256(blob.encode()).hexdigest()[:16]

    def __repr__(self) -> str:
        return f"<{type(self).__name__} |L|={len(self.left)} |R|={len(self.right)}>"


def _strip_certificates(obj):
    if isinstance(obj, dict):
        return {k: _strip_certificates(v) for k, v in obj.items() if k != "certificates"}
    if isinstance(obj, list):
        return [_strip_certificates(v) for v in obj]
    return obj


class CompleteGraph(BipartiteGraph):
    kind = "complete"

    def __init__(self, left: UniverseSpec, right: UniverseSpec) -> None:
        if right.cardinality() == 0:
            raise GraphError("degenerate graph: empty right universe")
        super().__init__(left, right)
        self._all = tuple(right)

    def _compute_neighbors(self, x):
        return self._all

    def params(self):
        return {"degree": len(self._all), "provenance": "complete bipartite"}


def complete_bipartite(left: UniverseSpec, right: UniverseSpec) -> CompleteGraph:
    return CompleteGraph(left, right)


def _stream_key(seed: int, x: BitLabel) -> int:
    h = hashlib.blake2b(f"{seed}:{x}".encode(), digest_size=16).digest()
    return int.from_bytes(h, "big")


class RandomGraph(BipartiteGraph):
    """Each left node draws ``degree`` distinct right nodes from a stream keyed by (seed, x)."""

    kind = "random"

    def __init__(self, left: UniverseSpec, right: UniverseSpec, seed: RandomGraphSeed) -> None:
        if seed.degree > right.cardinality():
            raise GraphError(f"degree {seed.degree} exceeds right size {right.cardinality()}")
        super().__init__(left, right)
        self.seed = seed

    def _compute_neighbors(self, x):
        rng = random.Random(_stream_key(self.seed.seed, x))
        picks = rng.sample(range(self.right.cardinality()), self.seed.degree)
        return tuple(self.right.label_at(j) for j in picks)

    def params(self):
        return {
            "degree": self.seed.degree,
            "seed": self.seed.seed,
            "prng": PRNG_DESCRIPTION,
            "provenance": "seeded random graph",
        }


def random_regular_graph(left: UniverseSpec, right: UniverseSpec, seed: RandomGraphSeed) -> RandomGraph:
    return RandomGraph(left, right, seed)


class ExplicitGraph(BipartiteGraph):
    """Adjacency given as a table; used for loaded edge dumps and hand-built instances."""

    kind = "explicit"

    def __init__(
        self,
        adjacency: Mapping[BitLabel, Sequence[BitLabel]],
        left: UniverseSpec | None = None,
        right: UniverseSpec | None = None,
    ) -> None:
        adj = {x: tuple(rs) for x, rs in adjacency.items()}
        if left is None:
            left = UniverseSpec.explicit(adj)
        if right is None:
            right = UniverseSpec.explicit({r for rs in adj.values() for r in rs})
        super().__init__(left, right)
        for x, rs in adj.items():
            if x not in left:
                raise GraphError(f"{x!r} is not in the left universe")
            for r in rs:
                if r not in right:
                    raise GraphError(f"neighbor {r!r} of {x!r} is not in the right universe")
        self._adj = adj

    def _compute_neighbors(self, x):
        return self._adj.get(x, ())

    def params(self):
        blob = json.dumps(sorted(self._adj.items()), separators=(",", ":"))
        return {
            "provenance": "explicit adjacency",
            "edges": sum(len(v) for v in self._adj.values()),
            "adjacency_sha256": hashlib.sha256(blob.encode()).hexdigest(),
        }


def enumerate_left(g: BipartiteGraph) -> Iterator[BitLabel]:
    return g.enumerate_left()


def edge_dump_lines(g: BipartiteGraph) -> Iterator[str]:
    from .io import render_label

    for x, r in g.edges():
        yield f"{render_label(x)} {render_label(r)}"


def graph_from_edges(pairs: Iterable[tuple[BitLabel, BitLabel]]) -> ExplicitGraph:
    adj: dict[BitLabel, list[BitLabel]] = {}
    for x, r in pairs:
        adj.setdefault(x, []).append(r)
    return ExplicitGraph(dict(sorted(adj.items(), key=lambda kv: label_key(kv[0]))))
