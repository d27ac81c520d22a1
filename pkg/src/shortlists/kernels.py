"""Backend selection for the subset-union kernels.

The compiled extension is used when it imports; otherwise (or when
``SHORTLISTS_PURE_PYTHON=1``) the pure-Python module is used.  Callers pass
masks as Python ints either way.
"""

from __future__ import annotations

import os
from typing import Sequence

import numpy as np

from . import _kernels_py

try:
    from . import _kernels as _compiled
except ImportError:  # extension not built
    _compiled = None

_WORD = (1 << 64) - 1


def _pack(masks: Sequence[int]) -> np.ndarray:
    width = max((m.bit_length() for m in masks), default=0)
    words = max(1, (width + 63) // 64)
    arr = np.zeros((len(masks), words), dtype=np.uint64)
    for i, m in enumerate(masks):
        t = 0
        while m:
            arr[i, t] = m & _WORD
            m >>= 64
            t += 1
    return arr


class PythonBackend:
    name = "python"

    def prepare(self, masks):
        return list(masks)

    def search_union(self, masks, k, threshold):
        return _kernels_py.search_union(masks, k, threshold)

    def union_sizes(self, masks, subsets):
        if isinstance(subsets, np.ndarray):
            subsets = subsets.tolist()
        return _kernels_py.union_sizes(masks, subsets)

    def greedy_union(self, masks, size, start):
        return _kernels_py.greedy_union(masks, size, start)


class CompiledBackend:
    """Accepts Python-int masks or the packed array returned by ``prepare``."""

    name = "cython"

    def prepare(self, masks):
        return _pack(masks)

    @staticmethod
    def _packed(masks):
        return masks if isinstance(masks, np.ndarray) else _pack(masks)

    def search_union(self, masks, k, threshold):
        return _compiled.search_union(self._packed(masks), k, threshold)

    def union_sizes(self, masks, subsets):
        if len(subsets) == 0:
            return []
        sub = np.ascontiguousarray(subsets, dtype=np.int_)
        return _compiled.union_sizes(self._packed(masks), sub).tolist()

    def greedy_union(self, masks, size, start):
        return _compiled.greedy_union(self._packed(masks), size, start)


def available() -> list[str]:
    return ["python"] + (["cython"] if _compiled is not None else [])


def get_backend(name: str | None = None):
    if name is None:
        pure = os.environ.get("SHORTLISTS_PURE_PYTHON", "") not in ("", "0")
        name = "python" if pure or _compiled is None else "cython"
    if name == "python":
        return PythonBackend()
    if name == "cython":
        if _compiled is None:
            raise RuntimeError("compiled kernels are not built")
        return CompiledBackend()
    raise ValueError(f"unknown backend {name!r}")


backend = get_backend()
