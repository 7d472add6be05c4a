"""Generators, gradings, empty rectangles and the tilde grid complex.

A generator is a tuple ``perm`` of 0-indexed rows: ``perm[c]`` is the
horizontal line met on vertical line ``c``; the point sits at ``(c, perm[c])``
in the fundamental domain.  Alexander gradings are stored doubled.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import permutations
from typing import Iterator, NamedTuple

import numpy as np

from . import kernels
from .grid import GridDiagram, component_count

__all__ = [
    "Bigrading",
    "Rectangle",
    "GridTables",
    "tables",
    "j_pairing",
    "gradings",
    "canonical_cycles",
    "classical_invariants",
    "GradingInconsistency",
    "rectangles_from",
    "tilde_differential",
    "tilde_codifferential",
    "enumerate_in_bigrading",
    "all_generators",
    "bigrading_counts",
    "boundary_matrix",
    "encode",
    "decode",
    "STABILIZATION_SIGN",
]

# Legendrian effect of each X-type stabilization (see grid.stabilize), as
# measured by classical_invariants on random grids: +1 is S+ (tb-1, r+1),
# -1 is S- (tb-1, r-1), 0 a Legendrian isotopy.  tests/test_complex.py
# re-derives this table.
STABILIZATION_SIGN = {"X:NW": 0, "X:SE": 0, "X:NE": +1, "X:SW": -1}


class Bigrading(NamedTuple):
    maslov: int
    alexander2: int

    def shifted(self, dm: int, da2: int) -> "Bigrading":
        return Bigrading(self.maslov + dm, self.alexander2 + da2)


class GradingInconsistency(AssertionError):
    """The Maslov and Alexander readings of x+/x- disagree."""


@dataclass(frozen=True)
class Rectangle:
    """Rectangle on the torus from ``source`` to ``target``.

    It spans vertical lines ``left -> right`` (rightward, cyclic) and
    horizontal lines ``bottom -> top`` (upward, cyclic).  The source holds
    the lower-left and upper-right corners.
    """

    left: int
    right: int
    bottom: int
    top: int
    o_hits: int
    x_hits: int
    interior_points: int

    @property
    def empty(self) -> bool:
        return self.o_hits == 0 and self.x_hits == 0 and self.interior_points == 0


@dataclass(frozen=True)
class GridTables:
    """Per-grid constants for O(n^2) grading evaluation."""

    n: int
    xs: tuple[int, ...]
    os: tuple[int, ...]
    w_o: np.ndarray  # w_o[c, r] = -2 J contribution of point (c, r) against O
    w_x: np.ndarray
    const_o: int
    const_x: int
    shift2: int  # n - number of components


def _marker_weights(marks: tuple[int, ...]) -> np.ndarray:
    n = len(marks)
    w = np.zeros((n, n), dtype=np.int64)
    for c in range(n):
        for r in range(n):
            # #{c' >= c : m[c'] >= r} + #{c' < c : m[c'] < r}
            above = sum(1 for cc in range(c, n) if marks[cc] >= r)
            below = sum(1 for cc in range(c) if marks[cc] < r)
            w[c, r] = -(above + below)
    w.setflags(write=False)
    return w


def _ascending_pairs(seq) -> int:
    n = len(seq)
    return sum(1 for i in range(n) for j in range(i + 1, n) if seq[i] < seq[j])


@lru_cache(maxsize=256)
def tables(g: GridDiagram) -> GridTables:
    return GridTables(
        n=g.n,
        xs=g.xs,
        os=g.os,
        w_o=_marker_weights(g.os),
        w_x=_marker_weights(g.xs),
        const_o=_ascending_pairs(g.os) + 1,
        const_x=_ascending_pairs(g.xs) + 1,
        shift2=g.n - component_count(g),
    )


def encode(perm) -> int:
    code = 0
    for c, r in enumerate(perm):
        code |= int(r) << (4 * c)
    return code


def decode(code: int, n: int) -> tuple[int, ...]:
    return tuple((code >> (4 * c)) & 15 for c in range(n))


# ---------------------------------------------------------------------------
# gradings


def j_pairing(p, q):
    """Symmetrized count of strictly dominating pairs, as a Fraction."""
    from fractions import Fraction

    def count(a, b):
        return sum(1 for s in a for t in b if s[0] < t[0] and s[1] < t[1])

    return Fraction(count(p, q) + count(q, p), 2)


def gradings(g: GridDiagram, perm) -> Bigrading:
    t = tables(g)
    asc = _ascending_pairs(perm)
    wo = sum(int(t.w_o[c, r]) for c, r in enumerate(perm))
    wx = sum(int(t.w_x[c, r]) for c, r in enumerate(perm))
    m_o = asc + wo + t.const_o
    m_x = asc + wx + t.const_x
    return Bigrading(m_o, m_o - m_x - t.shift2)


def canonical_cycles(g: GridDiagram) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """(x+, x-): corners to the upper right / lower left of each X."""
    n = g.n
    plus = [0] * n
    minus = [0] * n
    for c, r in enumerate(g.xs):
        plus[(c + 1) % n] = (r + 1) % n
        minus[c] = r
    return tuple(plus), tuple(minus)


def classical_invariants(g: GridDiagram) -> tuple[int, int, int]:
    """(tb, r, components) read off the gradings of x+ and x-."""
    xp, xm = canonical_cycles(g)
    gp, gm = gradings(g, xp), gradings(g, xm)
    comps = component_count(g)
    if (gp.maslov + gm.maslov) % 2:
        raise GradingInconsistency(f"M(x+)={gp.maslov} and M(x-)={gm.maslov} differ in parity")
    tb = (gp.maslov + gm.maslov) // 2 - 1
    r = (gm.maslov - gp.maslov) // 2
    # A(x+-) = (tb -+ r + |L|)/2, doubled
    if gp.alexander2 != tb - r + comps or gm.alexander2 != tb + r + comps:
        raise GradingInconsistency(
            f"Alexander readings {gp.alexander2}, {gm.alexander2} disagree with tb={tb}, r={r}"
        )
    return tb, r, comps


# ---------------------------------------------------------------------------
# rectangles and the differential


def _cyc_between(a: int, b: int, v: float, n: int) -> bool:
    """v strictly inside the rightward/upward cyclic interval (a, b)."""
    return 0 < (v - a) % n < (b - a) % n


def rectangles_from(g: GridDiagram, perm) -> Iterator[tuple[Rectangle, tuple[int, ...]]]:
    """Every rectangle out of ``perm`` (empty or not), with its target."""
    n = g.n
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            bottom, top = perm[i], perm[j]
            width = (j - i) % n
            height = (top - bottom) % n
            cols = [(i + k) % n for k in range(width)]
            o_hits = sum(1 for c in cols if (g.os[c] - bottom) % n < height)
            x_hits = sum(1 for c in cols if (g.xs[c] - bottom) % n < height)
            interior = sum(
                1 for c in cols[1:] if 0 < (perm[c] - bottom) % n < height
            )
            y = list(perm)
            y[i], y[j] = top, bottom
            yield Rectangle(i, j, bottom, top, o_hits, x_hits, interior), tuple(y)


def tilde_differential(g: GridDiagram, perm) -> list[tuple[int, ...]]:
    """Targets of empty, marking-free rectangles out of ``perm`` (mod 2)."""
    out = kernels.forward_targets(g.n, g.xs, g.os, perm)
    return _mod2([tuple(y) for y in out])


def tilde_codifferential(g: GridDiagram, perm) -> list[tuple[int, ...]]:
    """Generators whose differential contains ``perm`` (mod 2)."""
    out = kernels.reverse_sources(g.n, g.xs, g.os, perm)
    return _mod2([tuple(y) for y in out])


def _mod2(items):
    odd = {}
    for it in items:
        if it in odd:
            del odd[it]
        else:
            odd[it] = True
    return sorted(odd)


# ---------------------------------------------------------------------------
# generator enumeration


def all_generators(g: GridDiagram) -> Iterator[tuple[int, ...]]:
    return permutations(range(g.n))


def enumerate_in_bigrading(g: GridDiagram, b: Bigrading, budget: int | None = None) -> np.ndarray:
    """Packed codes of the generators in bigrading ``b``, lexicographic.

    Row ``k`` of the result decodes (``decode``) to the k-th generator in
    lexicographic order of its permutation.  ``budget`` caps the slice
    size; :class:`BudgetExceeded` is raised past it.
    """
    t = tables(g)
    codes = kernels.enumerate_slice(
        t.n, t.w_o, t.w_x, t.const_o, t.const_x, t.shift2, int(b[0]), int(b[1]), budget
    )
    return codes


def bigrading_counts(g: GridDiagram) -> dict[Bigrading, int]:
    t = tables(g)
    hist = kernels.grading_histogram(t.n, t.w_o, t.w_x, t.const_o, t.const_x, t.shift2)
    return {Bigrading(m, a): c for (m, a), c in hist.items()}


def boundary_matrix(g: GridDiagram, b: Bigrading, budget: int | None = None):
    """Matrix of the differential from slice ``(M+1, A)`` into slice ``b``.

    Returns ``(matrix, source_codes, target_codes)``; row/column k is the
    k-th code of the corresponding lexicographic slice.
    """
    from .f2 import BooleanMatrix

    target = enumerate_in_bigrading(g, b, budget)
    source = enumerate_in_bigrading(g, b.shifted(1, 0), budget)
    index = {int(c): k for k, c in enumerate(target)}
    src_idx, dst = kernels.forward_batch(g.n, g.xs, g.os, source)
    cols: list[list[int]] = [[] for _ in range(len(source))]
    for s, d in zip(src_idx.tolist(), dst.tolist()):
        cols[s].append(index[d])
    return BooleanMatrix.from_columns(len(target), cols), source, target
