# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled rectangle kernels; same contract as ``_pykernels``."""

import numpy as np
cimport numpy as cnp

from libc.stdint cimport int64_t, uint64_t

cnp.import_array()

BACKEND = "cython"

DEF MAXN = 16


cdef inline int _mod(int a, int n) nogil:
    a %= n
    return a + n if a < 0 else a


cdef int _forward(int n, const int* xs, const int* os, const int* perm,
                  int* out_i, int* out_j) nogil:
    cdef int i, j, step, col, xi, ceiling, d, h, k = 0
    for i in range(n):
        xi = perm[i]
        ceiling = n
        for step in range(1, n):
            col = (i + step - 1) % n
            d = _mod(xs[col] - xi, n)
            if d < ceiling:
                ceiling = d
            d = _mod(os[col] - xi, n)
            if d < ceiling:
                ceiling = d
            if ceiling == 0:
                break
            j = (i + step) % n
            h = _mod(perm[j] - xi, n)
            if h <= ceiling:
                out_i[k] = i
                out_j[k] = j
                k += 1
            if h < ceiling:
                ceiling = h
    return k


cdef int _reverse(int n, const int* xs, const int* os, const int* perm,
                  int* out_i, int* out_j) nogil:
    cdef int i, j, step, col, top, ceiling, d, h, k = 0
    for i in range(n):
        top = perm[i]
        ceiling = n
        for step in range(1, n):
            col = (i + step - 1) % n
            d = _mod(top - 1 - xs[col], n)
            if d < ceiling:
                ceiling = d
            d = _mod(top - 1 - os[col], n)
            if d < ceiling:
                ceiling = d
            if ceiling == 0:
                break
            j = (i + step) % n
            h = _mod(top - perm[j], n)
            if h <= ceiling:
                out_i[k] = i
                out_j[k] = j
                k += 1
            if h < ceiling:
                ceiling = h
    return k


cdef void _load(int n, object seq, int* buf) except *:
    cdef int c
    if n > MAXN:
        raise ValueError(f"grid number {n} exceeds {MAXN}")
    for c in range(n):
        buf[c] = seq[c]


cdef list _swaps(int n, int* p, int k, int* oi, int* oj):
    cdef int t, c
    out = []
    for t in range(k):
        y = [p[c] for c in range(n)]
        y[oi[t]], y[oj[t]] = p[oj[t]], p[oi[t]]
        out.append(y)
    return out


def forward_targets(int n, xs, os, perm):
    cdef int bx[MAXN]
    cdef int bo[MAXN]
    cdef int p[MAXN]
    cdef int oi[MAXN * MAXN]
    cdef int oj[MAXN * MAXN]
    _load(n, xs, bx)
    _load(n, os, bo)
    _load(n, perm, p)
    cdef int k = _forward(n, bx, bo, p, oi, oj)
    return _swaps(n, p, k, oi, oj)


def reverse_sources(int n, xs, os, perm):
    cdef int bx[MAXN]
    cdef int bo[MAXN]
    cdef int p[MAXN]
    cdef int oi[MAXN * MAXN]
    cdef int oj[MAXN * MAXN]
    _load(n, xs, bx)
    _load(n, os, bo)
    _load(n, perm, p)
    cdef int k = _reverse(n, bx, bo, p, oi, oj)
    return _swaps(n, p, k, oi, oj)


cdef tuple _batch(int n, xs, os, codes, bint forward):
    cdef int bx[MAXN]
    cdef int bo[MAXN]
    cdef int p[MAXN]
    cdef int oi[MAXN * MAXN]
    cdef int oj[MAXN * MAXN]
    _load(n, xs, bx)
    _load(n, os, bo)
    cdef cnp.ndarray[cnp.uint64_t, ndim=1] cin = np.ascontiguousarray(codes, dtype=np.uint64)
    cdef Py_ssize_t m = cin.shape[0], s, cap = max(16, 4 * m), used = 0
    cdef cnp.ndarray[cnp.int64_t, ndim=1] src = np.empty(cap, dtype=np.int64)
    cdef cnp.ndarray[cnp.uint64_t, ndim=1] dst = np.empty(cap, dtype=np.uint64)
    cdef uint64_t code, mi, mj
    cdef int c, k, t
    for s in range(m):
        code = cin[s]
        for c in range(n):
            p[c] = <int>((code >> (4 * c)) & 15)
        if forward:
            k = _forward(n, bx, bo, p, oi, oj)
        else:
            k = _reverse(n, bx, bo, p, oi, oj)
        if used + k > cap:
            cap = 2 * cap + k
            src = np.resize(src, cap)
            dst = np.resize(dst, cap)
        for t in range(k):
            mi = (<uint64_t>15) << (4 * oi[t])
            mj = (<uint64_t>15) << (4 * oj[t])
            src[used] = s
            dst[used] = ((code & ~(mi | mj))
                         | ((<uint64_t>p[oj[t]]) << (4 * oi[t]))
                         | ((<uint64_t>p[oi[t]]) << (4 * oj[t])))
            used += 1
    return src[:used].copy(), dst[:used].copy()


def forward_batch(int n, xs, os, codes):
    """Flattened (source index, target code) pairs, not reduced mod 2."""
    return _batch(n, xs, os, codes, True)


def reverse_batch(int n, xs, os, codes):
    return _batch(n, xs, os, codes, False)
