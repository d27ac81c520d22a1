"""Bit-string labels and finite label universes.

Labels are plain ``str`` objects over the alphabet ``{"0", "1"}``; the empty
string is a legal label.  The canonical order everywhere is (length, lexicographic).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional, Sequence

BitLabel = str

_BIT_CHARS = frozenset("01")


class LabelError(ValueError):
    pass


def check_label(s: str) -> BitLabel:
    if not isinstance(s, str) or not _BIT_CHARS.issuperset(s):
        raise LabelError(f"not a bit string: {s!r}")
    return s


def label_key(s: BitLabel) -> tuple[int, str]:
    return (len(s), s)


def to_int(s: BitLabel) -> int:
    return int(s, 2) if s else 0


def from_int(value: int, width: int) -> BitLabel:
    if value < 0 or (width == 0 and value) or value.bit_length() > width:
        raise LabelError(f"{value} does not fit in {width} bits")
    return format(value, f"0{width}b") if width else ""


def bit_width(count: int) -> int:
    """Smallest width w with 2**w >= count (0 for count <= 1)."""
    return max(0, (count - 1).bit_length())


def strings_of_length(n: int) -> Iterator[BitLabel]:
    for v in range(1 << n):
        yield from_int(v, n)


@dataclass(frozen=True)
class UniverseSpec:
    """A finite set of labels: one length, a range of lengths, or an explicit set."""

    kind: str
    min_len: int
    max_len: int
    members: Optional[tuple[BitLabel, ...]] = None
    _rank: Optional[dict] = field(default=None, repr=False, compare=False, hash=False)

    def __post_init__(self) -> None:
        if self.kind not in ("single-length", "length-range", "explicit-set"):
            raise ValueError(f"unknown universe kind {self.kind!r}")
        if self.kind == "explicit-set":
            if self.members is None:
                raise ValueError("explicit-set universe needs members")
            ordered = tuple(sorted(set(self.members), key=label_key))
            for m in ordered:
                check_label(m)
            object.__setattr__(self, "members", ordered)
            object.__setattr__(self, "_rank", {m: i for i, m in enumerate(ordered)})
            lens = [len(m) for m in ordered] or [0]
            object.__setattr__(self, "min_len", min(lens))
            object.__setattr__(self, "max_len", max(lens))
            return
        if self.min_len < 0 or self.min_len > self.max_len:
            raise ValueError(f"bad length range [{self.min_len}, {self.max_len}]")
        if self.kind == "single-length" and self.min_len != self.max_len:
            raise ValueError("single-length universe needs min_len == max_len")

    @classmethod
    def single(cls, n: int) -> "UniverseSpec":
        return cls("single-length", n, n)

    @classmethod
    def lengths(cls, lo: int, hi: int) -> "UniverseSpec":
        if lo == hi:
            return cls.single(lo)
        return cls("length-range", lo, hi)

    @classmethod
    def explicit(cls, members: Iterable[BitLabel]) -> "UniverseSpec":
        return cls("explicit-set", 0, 0, tuple(members))

    def cardinality(self) -> int:
        if self.members is not None:
            return len(self.members)
        return (1 << (self.max_len + 1)) - (1 << self.min_len)

    __len__ = cardinality

    def __contains__(self, s: object) -> bool:
        if not isinstance(s, str):
            return False
        if self._rank is not None:
            return s in self._rank
        return self.min_len <= len(s) <= self.max_len and _BIT_CHARS.issuperset(s)

    def index(self, s: BitLabel) -> int:
        """Rank of ``s`` in canonical order."""
        if self._rank is not None:
            try:
                return self._rank[s]
            except KeyError:
                raise LabelError(f"{s!r} not in universe") from None
        if s not in self:
            raise LabelError(f"{s!r} not in universe")
        return (1 << len(s)) - (1 << self.min_len) + to_int(s)

    def label_at(self, i: int) -> BitLabel:
        if not 0 <= i < self.cardinality():
            raise IndexError(i)
        if self.members is not None:
            return self.members[i]
        n = self.min_len
        while i >= (1 << n):
            i -= 1 << n
            n += 1
        return from_int(i, n)

    def __iter__(self) -> Iterator[BitLabel]:
        if self.members is not None:
            yield from self.members
            return
        for n in range(self.min_len, self.max_len + 1):
            yield from strings_of_length(n)

    def overlaps(self, other: "UniverseSpec") -> bool:
        if self.members is None and other.members is None:
            return not (self.max_len < other.min_len or other.max_len < self.min_len)
        small, big = (self, other) if self.cardinality() <= other.cardinality() else (other, self)
        return any(s in big for s in small)

    def to_json(self) -> dict:
        d = {"kind": self.kind, "min_len": self.min_len, "max_len": self.max_len}
        if self.members is not None:
            d["members"] = list(self.members)
        return d

    @classmethod
    def from_json(cls, d: dict) -> "UniverseSpec":
        if d["kind"] == "explicit-set":
            return cls.explicit(d["members"])
        return cls(d["kind"], int(d["min_len"]), int(d["max_len"]))


def sort_labels(labels: Sequence[BitLabel]) -> list[BitLabel]:
    return sorted(labels, key=label_key)
