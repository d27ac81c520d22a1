"""A seeded demo machine table and corpus for end-to-end runs."""

from __future__ import annotations

import random

from .bits import BitLabel, strings_of_length
from .shortlist import MachineTable


def _rand_string(rng: random.Random, n: int) -> BitLabel:
    return "".join(rng.choice("01") for _ in range(n))


def demo_machine_table(seed: int = 7) -> MachineTable:
    """54 base programs of lengths 2..6 with outputs of lengths 3..12.

    Length-2 programs give two strings inside the clause-3 range for k=3
    (lengths 3..6) and two long outputs (lengths 9..12) that clause 2 covers.
    Length-3 programs mostly land in the k=4 range (lengths 4..7).  Some
    longer programs repeat earlier outputs.
    """
    rng = random.Random(seed)
    entries: dict[BitLabel, tuple[BitLabel, int]] = {}
    used: set[BitLabel] = set()

    def fresh(n: int) -> BitLabel:
        while True:
            s = _rand_string(rng, n)
            if s not in used:
                used.add(s)
                return s

    progs2 = list(strings_of_length(2))
    for i, q in enumerate(progs2):
        n = rng.randint(3, 6) if i < 2 else rng.randint(9, 12)
        entries[q] = (fresh(n), rng.randint(1, 40))
    for i, q in enumerate(strings_of_length(3)):
        n = rng.randint(4, 7) if i < 6 else rng.randint(8, 12)
        entries[q] = (fresh(n), rng.randint(1, 40))
    earlier = [x for x, _ in entries.values()]
    for q in strings_of_length(4):
        x = rng.choice(earlier) if rng.random() < 0.25 else fresh(rng.randint(3, 12))
        entries[q] = (x, rng.randint(1, 60))
    for q in rng.sample(list(strings_of_length(5)), 16):
        entries[q] = (fresh(rng.randint(3, 12)), rng.randint(1, 60))
    for q in rng.sample(list(strings_of_length(6)), 10):
        entries[q] = (fresh(rng.randint(3, 12)), rng.randint(1, 60))
    return MachineTable(entries)


def demo_corpus(table: MachineTable, seed: int = 7, extra: int = 12) -> list[BitLabel]:
    """Every table output plus ``extra`` random strings of lengths 1..12."""
    rng = random.Random(seed + 1)
    out = list(dict.fromkeys(x for x, _ in table.entries.values()))
    seen = set(out)
    for _ in range(extra):
        s = _rand_string(rng, rng.randint(1, 12))
        while s in seen:
            s = _rand_string(rng, rng.randint(1, 12))
        seen.add(s)
        out.append(s)
    return out


def main(argv=None) -> None:
    import argparse
    from pathlib import Path

    from .io import format_machine_table, iter_label_lines

    ap = argparse.ArgumentParser(description="write the demo machine table and corpus")
    ap.add_argument("outdir", type=Path)
    ap.add_argument("--seed", type=int, default=7)
    args = ap.parse_args(argv)
    args.outdir.mkdir(parents=True, exist_ok=True)
    table = demo_machine_table(args.seed)
    (args.outdir / "machine.tsv").write_text(format_machine_table(table), encoding="utf-8")
    (args.outdir / "corpus.txt").write_text("".join(iter_label_lines(demo_corpus(table, args.seed))), encoding="utf-8")


if __name__ == "__main__":
    main()
