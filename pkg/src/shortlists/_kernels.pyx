# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled subset-union kernels.

Same search order and tie-breaking as ``_kernels_py``; masks arrive as a
C-contiguous ``uint64`` array of shape (n_left, n_words).
"""

import numpy as np

from libc.stdint cimport uint64_t
from libc.stdlib cimport malloc, free
from libc.string cimport memcpy

cdef extern from *:
    int __builtin_popcountll(unsigned long long) nogil


cdef inline int _popcount(const uint64_t* row, Py_ssize_t w) noexcept nogil:
    cdef int c = 0
    cdef Py_ssize_t t
    for t in range(w):
        c += __builtin_popcountll(row[t])
    return c


cdef inline int _or_count(uint64_t* dst, const uint64_t* a, const uint64_t* b, Py_ssize_t w) noexcept nogil:
    cdef int c = 0
    cdef Py_ssize_t t
    for t in range(w):
        dst[t] = a[t] | b[t]
        c += __builtin_popcountll(dst[t])
    return c


def search_union(const uint64_t[:, ::1] masks, int k, long threshold):
    cdef Py_ssize_t n = masks.shape[0]
    cdef Py_ssize_t w = masks.shape[1]
    if k < 1 or k > n:
        raise ValueError(f"subset size {k} outside [1, {n}]")
    cdef bint minimize = threshold <= 0
    cdef long best
    cdef Py_ssize_t j
    cdef int c

    cdef Py_ssize_t* idx = <Py_ssize_t*> malloc(k * sizeof(Py_ssize_t))
    cdef Py_ssize_t* wit = <Py_ssize_t*> malloc(k * sizeof(Py_ssize_t))
    cdef uint64_t* acc = <uint64_t*> malloc((k + 1) * (w if w > 0 else 1) * sizeof(uint64_t))
    cdef uint64_t* tmp = <uint64_t*> malloc((w if w > 0 else 1) * sizeof(uint64_t))
    if idx == NULL or wit == NULL or acc == NULL or tmp == NULL:
        free(idx); free(wit); free(acc); free(tmp)
        raise MemoryError()
    cdef Py_ssize_t t
    for t in range(w):
        acc[t] = 0
    if minimize:
        # any k-union fits inside the union of all rows
        for t in range(w):
            tmp[t] = 0
        for j in range(n):
            for t in range(w):
                tmp[t] |= masks[j, t]
        best = _popcount(tmp, w) + 1
    else:
        best = threshold
    cdef long found = -1
    cdef long long visited = 0
    cdef Py_ssize_t d = 0
    cdef Py_ssize_t i = 0
    cdef bint done = False
    with nogil:
        while True:
            if i > n - k + d:
                if d == 0:
                    break
                d -= 1
                i = idx[d] + 1
                continue
            visited += 1
            c = _or_count(tmp, &acc[d * w], &masks[i, 0], w)
            if c >= best:
                i += 1
                continue
            if d == k - 1:
                for t in range(d):
                    wit[t] = idx[t]
                wit[d] = i
                found = c
                if not minimize:
                    done = True
                    break
                best = c
                i += 1
                continue
            idx[d] = i
            memcpy(&acc[(d + 1) * w], tmp, w * sizeof(uint64_t))
            d += 1
            i += 1
    result_w = tuple(wit[t] for t in range(k)) if found >= 0 else ()
    free(idx); free(wit); free(acc); free(tmp)
    if minimize or done:
        return int(found), result_w, int(visited)
    return -1, (), int(visited)


def union_sizes(const uint64_t[:, ::1] masks, const long[:, ::1] subsets):
    cdef Py_ssize_t m = subsets.shape[0]
    cdef Py_ssize_t k = subsets.shape[1]
    cdef Py_ssize_t w = masks.shape[1]
    out = np.empty(m, dtype=np.int64)
    cdef long long[::1] ov = out
    cdef uint64_t word
    cdef Py_ssize_t s, j, t
    cdef int c
    with nogil:
        for s in range(m):
            c = 0
            for t in range(w):
                word = 0
                for j in range(k):
                    word = word | masks[subsets[s, j], t]
                c += __builtin_popcountll(word)
            ov[s] = c
    return out


def greedy_union(const uint64_t[:, ::1] masks, int size, Py_ssize_t start):
    cdef Py_ssize_t n = masks.shape[0]
    cdef Py_ssize_t w = masks.shape[1]
    if size < 1 or size > n:
        raise ValueError(f"subset size {size} outside [1, {n}]")
    cdef uint64_t* acc = <uint64_t*> malloc((w if w > 0 else 1) * sizeof(uint64_t))
    cdef char* taken = <char*> malloc(n)
    if acc == NULL or taken == NULL:
        free(acc); free(taken)
        raise MemoryError()
    cdef Py_ssize_t j, t, step, best_j
    cdef int c, best_c
    for j in range(n):
        taken[j] = 0
    taken[start] = 1
    for t in range(w):
        acc[t] = masks[start, t]
    chosen = [start]
    for step in range(size - 1):
        best_j = -1
        best_c = -1
        for j in range(n):
            if taken[j]:
                continue
            c = 0
            for t in range(w):
                c += __builtin_popcountll(acc[t] | masks[j, t])
            if best_j < 0 or c < best_c:
                best_j = j
                best_c = c
        taken[best_j] = 1
        chosen.append(best_j)
        for t in range(w):
            acc[t] = acc[t] | masks[best_j, t]
    c = _popcount(acc, w)
    free(acc); free(taken)
    return tuple(sorted(chosen)), int(c)
