# cython: language_level=3
"""Compiled kernels over a (points, words) uint64 column matrix."""

import numpy as np

from libc.stdint cimport uint64_t
from libc.stdlib cimport calloc, free

cdef extern from *:
    """
    static inline int tl_popcount(unsigned long long x) { return __builtin_popcountll(x); }
    """
    int tl_popcount(unsigned long long x) nogil

NAME = "cython"

DEF MAX_T = 24


def prepare(words, Py_ssize_t n_concepts):
    arr = np.ascontiguousarray(words, dtype=np.uint64)
    return arr, n_concepts


cdef inline uint64_t _tail_mask(Py_ssize_t n) nogil:
    cdef Py_ssize_t r = n % 64
    if r == 0:
        return <uint64_t>0xFFFFFFFFFFFFFFFF
    return ((<uint64_t>1) << r) - 1


cdef void _split_counts(const uint64_t[:, ::1] cols, Py_ssize_t nwords, uint64_t tail,
                        Py_ssize_t* pts, int t, long long* counts, uint64_t* buf) noexcept nogil:
    cdef Py_ssize_t w
    cdef int j, i, width
    cdef uint64_t v, c
    for w in range(nwords):
        buf[0] = tail if w == nwords - 1 else <uint64_t>0xFFFFFFFFFFFFFFFF
        width = 1
        for j in range(t):
            c = cols[pts[j], w]
            # expand back to front so leaves stay in pattern order
            for i in range(width - 1, -1, -1):
                v = buf[i]
                buf[2 * i] = v & ~c
                buf[2 * i + 1] = v & c
            width *= 2
        for i in range(width):
            counts[i] += tl_popcount(buf[i])


cdef void _gather_counts(const uint64_t[:, ::1] cols, Py_ssize_t nwords, Py_ssize_t n,
                         Py_ssize_t* pts, int t, long long* counts) noexcept nogil:
    cdef Py_ssize_t w, nbits
    cdef int j, b
    cdef uint64_t idx
    cdef uint64_t local[MAX_T]
    for w in range(nwords):
        for j in range(t):
            local[j] = cols[pts[j], w]
        nbits = 64 if w < nwords - 1 or n % 64 == 0 else n % 64
        for b in range(nbits):
            idx = 0
            for j in range(t):
                idx = (idx << 1) | ((local[j] >> b) & 1)
            counts[idx] += 1


def pattern_counts(handle, points):
    words, n = handle
    cdef const uint64_t[:, ::1] cols = words
    cdef int t = len(points)
    if t > MAX_T:
        raise ValueError(f"at most {MAX_T} points per pattern count")
    cdef Py_ssize_t nwords = cols.shape[1]
    cdef Py_ssize_t size = (<Py_ssize_t>1) << t
    cdef Py_ssize_t pts[MAX_T]
    cdef long long* counts = <long long*>calloc(size, sizeof(long long))
    cdef uint64_t* buf = <uint64_t*>calloc(size, sizeof(uint64_t))
    cdef Py_ssize_t i
    if counts == NULL or buf == NULL:
        free(counts)
        free(buf)
        raise MemoryError()
    try:
        for i in range(t):
            pts[i] = points[i]
        if nwords:
            if t <= 6:
                _split_counts(cols, nwords, _tail_mask(n), pts, t, counts, buf)
            else:
                _gather_counts(cols, nwords, n, pts, t, counts)
        return [counts[i] for i in range(size)]
    finally:
        free(counts)
        free(buf)


def shatters(handle, points):
    words, n = handle
    if n < (1 << len(points)):
        return False
    return all(c > 0 for c in pattern_counts(handle, points))


def scan_best(handle, int k):
    """Smallest nonzero restriction count over point sets of size 1..k.

    Same visiting order and strict-improvement rule as the Python kernel.
    """
    words, n = handle
    cdef const uint64_t[:, ::1] cols = words
    cdef Py_ssize_t npts = cols.shape[0]
    cdef Py_ssize_t nwords = cols.shape[1]
    if k > npts:
        k = <int>npts
    if k > MAX_T:
        raise ValueError(f"k is limited to {MAX_T}")
    if nwords == 0 or k < 1:
        return None
    cdef uint64_t tail = _tail_mask(n)
    cdef Py_ssize_t size = (<Py_ssize_t>1) << k
    cdef long long* counts = <long long*>calloc(size, sizeof(long long))
    cdef uint64_t* buf = <uint64_t*>calloc(size, sizeof(uint64_t))
    cdef Py_ssize_t pts[MAX_T]
    cdef Py_ssize_t best_pts[MAX_T]
    cdef long long best = -1
    cdef int best_t = 0
    cdef Py_ssize_t best_p = 0
    cdef int t, j, m
    cdef Py_ssize_t p, width
    if counts == NULL or buf == NULL:
        free(counts)
        free(buf)
        raise MemoryError()
    try:
        with nogil:
            for t in range(1, k + 1):
                width = (<Py_ssize_t>1) << t
                for j in range(t):
                    pts[j] = j
                while True:
                    for p in range(width):
                        counts[p] = 0
                    _split_counts(cols, nwords, tail, pts, t, counts, buf)
                    for p in range(width):
                        if counts[p] > 0 and (best < 0 or counts[p] < best):
                            best = counts[p]
                            best_t = t
                            best_p = p
                            for m in range(t):
                                best_pts[m] = pts[m]
                    # next combination in lexicographic order
                    j = t - 1
                    while j >= 0 and pts[j] == npts - t + j:
                        j -= 1
                    if j < 0:
                        break
                    pts[j] += 1
                    for m in range(j + 1, t):
                        pts[m] = pts[m - 1] + 1
        if best < 0:
            return None
        return best, tuple(best_pts[m] for m in range(best_t)), best_p
    finally:
        free(counts)
        free(buf)
