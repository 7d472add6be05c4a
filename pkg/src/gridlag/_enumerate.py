"""Bigrading-restricted generator enumeration by meet-in-the-middle.

Writing a generator as a left half (columns ``0..h-1``) and a right half,

    M  = asc(left) + asc(right) + cross(S) + sum w_o[c, x[c]] + const_o
    2A = sum (w_o - w_x)[c, x[c]] + const_o - const_x - shift2

where ``S`` is the set of rows used on the left and ``cross(S)`` counts
ascending pairs straddling the split.  ``asc`` of a half depends only on
its relative order pattern, and ``cross`` only on ``S``, so each row subset
is a join of two small tables on (M, 2A).
"""

from __future__ import annotations

from functools import lru_cache
from itertools import combinations, permutations

import numpy as np


class BudgetExceeded(RuntimeError):
    """Raised when a computation would exceed its generator budget."""

    def __init__(self, what: str, needed: int, budget: int):
        super().__init__(f"{what}: {needed} generators exceed the budget of {budget}")
        self.needed = needed
        self.budget = budget


@lru_cache(maxsize=32)
def _patterns(k: int):
    pats = np.array(list(permutations(range(k))), dtype=np.int64).reshape(-1, k)
    asc = np.zeros(len(pats), dtype=np.int64)
    for a in range(k):
        for b in range(a + 1, k):
            asc += pats[:, a] < pats[:, b]
    return pats, asc


def _half_tables(rows_sorted, cols, w_o, w_d, pats, asc):
    rows = np.asarray(rows_sorted, dtype=np.int64)[pats]  # (k!, k)
    colv = np.asarray(cols, dtype=np.int64)
    m = asc + w_o[colv, rows].sum(axis=1)
    a = w_d[colv, rows].sum(axis=1)
    shifts = (4 * colv).astype(np.uint64)
    codes = (rows.astype(np.uint64) << shifts).sum(axis=1, dtype=np.uint64)
    return m, a, codes


def _subset_iter(n: int, h: int):
    for left in combinations(range(n), h):
        lset = set(left)
        right = tuple(r for r in range(n) if r not in lset)
        cross = sum(1 for r in right for s in left if s < r)
        yield left, right, cross


def enumerate_slice(n, w_o, w_x, const_o, const_x, shift2, maslov, alexander2, budget=None):
    w_o = np.asarray(w_o, dtype=np.int64)
    w_d = w_o - np.asarray(w_x, dtype=np.int64)
    a_target = alexander2 - (const_o - const_x - shift2)
    m_target = maslov - const_o
    h = n // 2
    lp, lasc = _patterns(h)
    rp, rasc = _patterns(n - h)
    lcols = range(h)
    rcols = range(h, n)
    chunks = []
    total = 0
    for left, right, cross in _subset_iter(n, h):
        ml, al, cl = _half_tables(left, lcols, w_o, w_d, lp, lasc)
        mr, ar, cr = _half_tables(right, rcols, w_o, w_d, rp, rasc)
        # join on key = m * K + a (a shifted non-negative)
        span = 4 * n * n + 1
        kr = (mr * span + (ar + 2 * n * n))
        need_a = a_target - al
        need = ((m_target - cross) - ml) * span + (need_a + 2 * n * n)
        need[np.abs(need_a) > 2 * n * n] = -1
        order = np.argsort(kr, kind="stable")
        krs = kr[order]
        lo = np.searchsorted(krs, need, side="left")
        hi = np.searchsorted(krs, need, side="right")
        cnt = hi - lo
        k = int(cnt.sum())
        if not k:
            continue
        total += k
        if budget is not None and total > budget:
            raise BudgetExceeded("bigrading slice", total, budget)
        li = np.repeat(np.arange(len(ml)), cnt)
        starts = np.repeat(lo - np.concatenate(([0], np.cumsum(cnt)[:-1])), cnt)
        ri = order[np.arange(k) + starts]
        chunks.append(cl[li] | cr[ri])
    if not chunks:
        return np.zeros(0, dtype=np.uint64)
    codes = np.concatenate(chunks)
    return _lex_sort(codes, n)


def _lex_sort(codes, n):
    """Sort packed codes lexicographically by (perm[0], perm[1], ...)."""
    # column 0 sits in the low nibble; reverse nibble order to sort numerically
    key = np.zeros_like(codes)
    for c in range(n):
        nib = (codes >> np.uint64(4 * c)) & np.uint64(15)
        key |= nib << np.uint64(4 * (n - 1 - c))
    return codes[np.argsort(key, kind="stable")]


def grading_histogram(n, w_o, w_x, const_o, const_x, shift2):
    """Counts of generators per (M, 2A) over all of S(G)."""
    w_o = np.asarray(w_o, dtype=np.int64)
    w_d = w_o - np.asarray(w_x, dtype=np.int64)
    h = n // 2
    lp, lasc = _patterns(h)
    rp, rasc = _patterns(n - h)
    counts: dict[tuple[int, int], int] = {}
    off = const_o - const_x - shift2
    for left, right, cross in _subset_iter(n, h):
        ml, al, _ = _half_tables(left, range(h), w_o, w_d, lp, lasc)
        mr, ar, _ = _half_tables(right, range(h, n), w_o, w_d, rp, rasc)
        lk, lc = np.unique(np.stack([ml, al], 1), axis=0, return_counts=True)
        rk, rc = np.unique(np.stack([mr, ar], 1), axis=0, return_counts=True)
        for (m1, a1), c1 in zip(lk.tolist(), lc.tolist()):
            for (m2, a2), c2 in zip(rk.tolist(), rc.tolist()):
                key = (m1 + m2 + cross + const_o, a1 + a2 + off)
                counts[key] = counts.get(key, 0) + c1 * c2
    return counts
