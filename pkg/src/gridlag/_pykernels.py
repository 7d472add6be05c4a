"""Pure-Python rectangle kernels (fallback when the extension is absent)."""

from __future__ import annotations

import numpy as np

BACKEND = "python"


def forward_targets(n, xs, os, perm):
    """Targets of every marking-free empty rectangle out of ``perm``."""
    out = []
    for i in range(n):
        xi = perm[i]
        ceiling = n
        for step in range(1, n):
            col = (i + step - 1) % n
            d = (xs[col] - xi) % n
            if d < ceiling:
                ceiling = d
            d = (os[col] - xi) % n
            if d < ceiling:
                ceiling = d
            if ceiling == 0:
                break
            j = (i + step) % n
            h = (perm[j] - xi) % n
            if h <= ceiling:
                y = list(perm)
                y[i], y[j] = perm[j], xi
                out.append(y)
            if h < ceiling:
                ceiling = h
    return out


def reverse_sources(n, xs, os, perm):
    """Sources of every marking-free empty rectangle into ``perm``."""
    out = []
    for i in range(n):
        top = perm[i]
        ceiling = n
        for step in range(1, n):
            col = (i + step - 1) % n
            d = (top - 1 - xs[col]) % n
            if d < ceiling:
                ceiling = d
            d = (top - 1 - os[col]) % n
            if d < ceiling:
                ceiling = d
            if ceiling == 0:
                break
            j = (i + step) % n
            h = (top - perm[j]) % n
            if h <= ceiling:
                y = list(perm)
                y[i], y[j] = perm[j], top
                out.append(y)
            if h < ceiling:
                ceiling = h
    return out


def _unpack(code, n):
    return [(code >> (4 * c)) & 15 for c in range(n)]


def _pack(perm):
    code = 0
    for c, r in enumerate(perm):
        code |= r << (4 * c)
    return code


def _batch(fn, n, xs, os, codes):
    src = []
    dst = []
    for k, code in enumerate(np.asarray(codes, dtype=np.uint64).tolist()):
        for y in fn(n, xs, os, _unpack(code, n)):
            src.append(k)
            dst.append(_pack(y))
    return np.asarray(src, dtype=np.int64), np.asarray(dst, dtype=np.uint64)


def forward_batch(n, xs, os, codes):
    """Flattened (source index, target code) pairs, not reduced mod 2."""
    return _batch(forward_targets, n, xs, os, codes)


def reverse_batch(n, xs, os, codes):
    return _batch(reverse_sources, n, xs, os, codes)
