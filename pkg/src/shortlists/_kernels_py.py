"""Pure-Python subset-union kernels (fallback for the compiled ``_kernels``).

Masks are Python ints, bit ``j`` set iff the left node is adjacent to right
node ``j``.  The compiled module runs the exact same search order, so both
backends return identical witnesses.
"""

from __future__ import annotations

from typing import Sequence


def search_union(masks: Sequence[int], k: int, threshold: int) -> tuple[int, tuple[int, ...], int]:
    """Depth-first scan of all ``k``-subsets in lexicographic index order.

    With ``threshold > 0`` returns the first subset whose union has fewer than
    ``threshold`` bits, or ``(-1, (), visited)`` if none exists.  With
    ``threshold <= 0`` returns the minimum union size and the lexicographically
    first subset attaining it.  Subtrees whose partial union already reaches the
    current bound are skipped, since unions only grow.
    """
    n = len(masks)
    if not 1 <= k <= n:
        raise ValueError(f"subset size {k} outside [1, {n}]")
    minimize = threshold <= 0
    if minimize:
        # any k-union fits inside the union of all masks
        everything = 0
        for m in masks:
            everything |= m
        best = everything.bit_count() + 1
    else:
        best = threshold
    witness: tuple[int, ...] = ()
    found = -1
    idx = [0] * k
    acc = [0] * k
    visited = 0
    d = 0
    i = 0
    while True:
        if i > n - k + d:
            if d == 0:
                break
            d -= 1
            i = idx[d] + 1
            continue
        visited += 1
        a = acc[d] | masks[i]
        c = a.bit_count()
        if c >= best:
            i += 1
            continue
        if d == k - 1:
            witness = tuple(idx[:d]) + (i,)
            found = c
            if not minimize:
                return c, witness, visited
            best = c
            i += 1
            continue
        idx[d] = i
        acc[d + 1] = a
        d += 1
        i += 1
    if minimize:
        return found, witness, visited
    return -1, (), visited


def union_sizes(masks: Sequence[int], subsets: Sequence[Sequence[int]]) -> list[int]:
    out = []
    for sub in subsets:
        a = 0
        for j in sub:
            a |= masks[j]
        out.append(a.bit_count())
    return out


def greedy_union(masks: Sequence[int], size: int, start: int) -> tuple[tuple[int, ...], int]:
    """Grow a subset from ``start``, each step adding the node with the fewest new neighbors."""
    n = len(masks)
    if not 1 <= size <= n:
        raise ValueError(f"subset size {size} outside [1, {n}]")
    chosen = [start]
    taken = [False] * n
    taken[start] = True
    acc = masks[start]
    for _ in range(size - 1):
        best_j, best_c = -1, -1
        for j in range(n):
            if taken[j]:
                continue
            c = (acc | masks[j]).bit_count()
            if best_j < 0 or c < best_c:
                best_j, best_c = j, c
        taken[best_j] = True
        chosen.append(best_j)
        acc |= masks[best_j]
    return tuple(sorted(chosen)), acc.bit_count()
