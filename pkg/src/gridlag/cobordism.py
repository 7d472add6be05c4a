"""Chain maps for elementary cobordisms and their composition along scripts.

Every map runs from the grid of the upper Legendrian to the grid of the
lower one.  Pinch and commutation maps live on a combined diagram: the two
grids share all markings and all circles except one horizontal circle,
``beta`` for the source grid and ``gamma`` for the target.  Both sit at the
same line index ``s``; they cross at ``a`` (moving rightward, ``beta`` drops
below ``gamma``) and ``b`` (it climbs back).  A vertical line ``c`` lies in
the "+1 lens" when ``beta`` is above ``gamma`` there, else in the "-1 lens".
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import permutations
from typing import Callable, Iterable, Sequence

from .complex import Bigrading, canonical_cycles, gradings, tilde_differential
from .grid import (
    GridDiagram,
    GridError,
    IllegalMoveError,
    commute_columns,
    commute_rows,
    cyclic_translate,
    destabilize,
    is_legal_row_commutation,
    pinch,
    pinch_window,
    serialize_grid,
    stabilize,
    transpose,
)

__all__ = [
    "CombinedDiagram",
    "ChainMapRecord",
    "BirthData",
    "PinchError",
    "ReplayError",
    "ScriptResult",
    "detect_pinch",
    "pentagon_map",
    "triangle_map",
    "pinch_map",
    "birth_insert",
    "birth_map",
    "isotopy_map",
    "commutation_diagram",
    "parse_script",
    "compose_script",
    "identity_map",
    "expected_bidegree",
]

Perm = tuple[int, ...]


class PinchError(GridError):
    """Two grids that are not related by a single pinch."""


class ReplayError(GridError):
    """A script step that cannot be applied; ``step`` is 0-indexed."""

    def __init__(self, step: int, message: str):
        super().__init__(f"step {step}: {message}")
        self.step = step


def _between(v: float, lo: float, hi: float, n: int) -> bool:
    """v strictly inside the rightward cyclic interval (lo, hi)."""
    return 0 < (v - lo) % n < (hi - lo) % n


def _mod2(items: Iterable[Perm]) -> tuple[Perm, ...]:
    odd: dict[Perm, bool] = {}
    for it in items:
        if it in odd:
            del odd[it]
        else:
            odd[it] = True
    return tuple(sorted(odd))


# ---------------------------------------------------------------------------
# chain map records


@dataclass
class ChainMapRecord:
    """Linear map from the tilde complex of ``source`` to that of ``target``.

    Columns are computed on demand by ``rule`` and cached; ``bidegree`` is
    (Maslov shift, doubled Alexander shift).
    """

    source: GridDiagram
    target: GridDiagram
    bidegree: Bigrading
    kind: str
    rule: Callable[[Perm], Iterable[Perm]] = field(repr=False)
    _cache: dict = field(default_factory=dict, repr=False)

    def __call__(self, x: Sequence[int]) -> tuple[Perm, ...]:
        x = tuple(x)
        hit = self._cache.get(x)
        if hit is None:
            hit = _mod2(self.rule(x))
            self._cache[x] = hit
        return hit

    def apply_chain(self, chain: Iterable[Perm]) -> tuple[Perm, ...]:
        out: list[Perm] = []
        for x in chain:
            out.extend(self(x))
        return _mod2(out)

    def generators(self) -> Iterable[Perm]:
        return permutations(range(self.source.n))

    def chain_map_failures(self, gens: Iterable[Perm] | None = None) -> list[Perm]:
        """Source generators where the differential fails to commute."""
        bad = []
        for x in gens if gens is not None else self.generators():
            left = []
            for y in self(x):
                left.extend(tilde_differential(self.target, y))
            right = self.apply_chain(tilde_differential(self.source, x))
            if _mod2(left) != right:
                bad.append(tuple(x))
        return bad

    def homogeneity_failures(self, gens: Iterable[Perm] | None = None) -> list[Perm]:
        """Source generators with an image term off the declared bidegree."""
        bad = []
        for x in gens if gens is not None else self.generators():
            want = gradings(self.source, x).shifted(*self.bidegree)
            if any(gradings(self.target, y) != want for y in self(x)):
                bad.append(tuple(x))
        return bad

    def preserves_canonical_cycles(self) -> tuple[bool, bool]:
        """Whether x+ and x- of the source map to x+ and x- of the target."""
        sp, sm = canonical_cycles(self.source)
        tp, tm = canonical_cycles(self.target)
        return self(sp) == (tp,), self(sm) == (tm,)

    def preserves_canonical_classes(self, budget: int | None = None) -> tuple[bool, bool]:
        """Whether f(x+) and f(x-) are homologous to x+ and x- of the target."""
        from .f2 import is_boundary

        out = []
        for x, y in zip(canonical_cycles(self.source), canonical_cycles(self.target)):
            out.append(is_boundary(self.target, list(self(x)) + [y], budget))
        return tuple(out)

    def then(self, other: "ChainMapRecord") -> "ChainMapRecord":
        """``other`` after ``self``."""
        if other.source != self.target:
            raise ValueError("maps do not compose: grids differ")
        return ChainMapRecord(
            self.source,
            other.target,
            self.bidegree.shifted(*other.bidegree),
            f"{other.kind}*{self.kind}",
            lambda x: other.apply_chain(self(x)),
        )

    def to_json(self, gens: Iterable[Perm] | None = None) -> dict:
        from .f2 import grid_hash

        gens = list(gens) if gens is not None else list(self.generators())
        return {
            "kind": self.kind,
            "source": serialize_grid(self.source),
            "target": serialize_grid(self.target),
            "source_hash": grid_hash(self.source),
            "target_hash": grid_hash(self.target),
            "bidegree": {"maslov": self.bidegree.maslov, "alexander2": self.bidegree.alexander2},
            "columns": [
                {"source": [r + 1 for r in x], "image": [[r + 1 for r in y] for y in self(x)]}
                for x in gens
                if self(x)
            ],
        }


def identity_map(g: GridDiagram) -> ChainMapRecord:
    return ChainMapRecord(g, g, Bigrading(0, 0), "identity", lambda x: [x])


def expected_bidegree(chi: int, lower_components: int, upper_components: int) -> Bigrading:
    """(chi, chi + |L-| - |L+|), the Alexander entry doubled."""
    return Bigrading(chi, chi + lower_components - upper_components)


# ---------------------------------------------------------------------------
# combined diagrams


@dataclass(frozen=True)
class CombinedDiagram:
    """Source and target grids drawn on one torus.

    ``plus_cols``/``minus_cols`` hold the columns of the band markings that
    sit in the +1 and -1 lens; all other markings have the same square in
    both grids.  ``a_pos``/``b_pos`` are the horizontal positions of the
    crossings, chosen off the integer lines.
    """

    source: GridDiagram
    target: GridDiagram
    case: str
    s: int
    plus_cols: tuple[int, ...]
    minus_cols: tuple[int, ...]
    a_pos: float
    b_pos: float

    @property
    def n(self) -> int:
        return self.source.n

    def sigma(self, line: int) -> int:
        return -1 if _between(line, self.a_pos, self.b_pos, self.n) else 1

    def fixed_marks(self) -> list[list[int]]:
        """Per column, the rows of markings outside the lenses."""
        band = set(self.plus_cols) | set(self.minus_cols)
        g = self.target
        out: list[list[int]] = [[] for _ in range(self.n)]
        lows = {(self.s - 1) % self.n, self.s}
        for c in range(self.n):
            for kind, r in (("X", g.xs[c]), ("O", g.os[c])):
                if c in band and r in lows and self._is_band(kind, c):
                    continue
                out[c].append(r)
        return out

    def _is_band(self, kind: str, c: int) -> bool:
        if self.case == "I":
            return kind == "X"
        if self.case == "II":
            return kind == "O"
        return True  # commutation: every marking in the two rows


def _gap_position(lo: int, hi: int, n: int, where: str | int) -> float:
    """A crossing position strictly between marking centres lo+.5 and hi+.5.

    ``where`` is "left" (just right of lo's centre), "right" (just left of
    hi's centre), or an int k placing the crossing just left of the k-th
    vertical line past lo.
    """
    span = (hi - lo) % n
    if where == "left":
        return (lo + 0.75) % n
    if where == "right":
        return (lo + span + 0.25) % n
    k = int(where)
    if not 1 <= k <= span:
        raise ValueError(f"crossing offset {k} outside 1..{span}")
    return (lo + k - 0.25) % n


def detect_pinch(
    g_plus: GridDiagram,
    g_minus: GridDiagram,
    a_pos: float | None = None,
    b_pos: float | None = None,
) -> CombinedDiagram:
    """Identify the pinch window relating ``g_plus`` (upper) and ``g_minus``.

    The grids must agree except for two markings of one kind that trade
    adjacent rows, with ``g_minus`` showing the pattern of
    :func:`gridlag.grid.pinch_window`.  ``a_pos``/``b_pos`` override the
    default crossing positions.
    """
    if g_plus.n != g_minus.n:
        raise PinchError(f"grid numbers differ: {g_plus.n} and {g_minus.n}")
    n = g_minus.n
    dx = [c for c in range(n) if g_plus.xs[c] != g_minus.xs[c]]
    do = [c for c in range(n) if g_plus.os[c] != g_minus.os[c]]
    if not dx and not do:
        raise PinchError("not in pinch position: the grids are identical")
    if dx and do:
        raise PinchError(
            f"not in pinch position: X differs in column {dx[0] + 1} and O in column {do[0] + 1}"
        )
    case, diff, rows_m, rows_p = (
        ("I", dx, g_minus.xs, g_plus.xs) if dx else ("II", do, g_minus.os, g_plus.os)
    )
    if len(diff) != 2:
        raise PinchError(
            f"not in pinch position: markings differ in {len(diff)} columns, "
            f"first mismatch outside the window at column {diff[2 if len(diff) > 2 else 0] + 1}"
        )
    u, v = diff
    ru, rv = rows_m[u], rows_m[v]
    if rows_p[u] != rv or rows_p[v] != ru:
        raise PinchError(f"not in pinch position: columns {u + 1} and {v + 1} do not trade rows")
    if (ru - rv) % n == 1:
        low = rv
    elif (rv - ru) % n == 1:
        low = ru
    else:
        raise PinchError(f"not in pinch position: rows {ru + 1} and {rv + 1} are not adjacent")
    try:
        w = pinch_window(g_minus, low + 1, case)
    except IllegalMoveError as exc:
        raise PinchError(f"not in pinch position: {exc}") from None
    if pinch(g_minus, low + 1, case) != g_plus:
        raise PinchError("not in pinch position: upper grid is not the pinched lower grid")
    if a_pos is None:
        # With a column between the X's, offset 2 puts a line on each side
        # of a and both x+ and x- map on the nose.  Adjacent X's leave no
        # such spot: a sits left of the shared line, x- maps on the nose and
        # x+ only up to a boundary.
        offset = 2 if (w.q - w.p) % n >= 2 else 1
        a_pos = _gap_position(w.p, w.q, n, offset if case == "I" else "left")
    if b_pos is None:
        b_pos = _gap_position(w.q, w.p, n, 2 if case == "I" and (w.p - w.q) % n >= 2 else "left")
    return CombinedDiagram(g_plus, g_minus, case, w.top, (w.p,), (w.q,), a_pos, b_pos)


def commutation_diagram(
    g0: GridDiagram, row: int, a_at: str = "left", b_at: str = "left"
) -> CombinedDiagram:
    """Combined diagram for commuting rows ``row`` and ``row+1`` (1-indexed)."""
    n = g0.n
    low = row - 1
    if not 0 <= low < n:
        raise IllegalMoveError(f"row {row} outside 1..{n}")
    if not is_legal_row_commutation(g0, low):
        raise IllegalMoveError(f"rows {row} and {(low + 1) % n + 1} interleave")
    top = (low + 1) % n
    g1 = commute_rows(g0, row)
    lows = sorted((g0.x_col_of_row[low], g0.o_col_of_row[low]))
    highs = sorted((g0.x_col_of_row[top], g0.o_col_of_row[top]))
    # cyclic order is lows, lows, highs, highs; find the arc ends
    l_first, l_last = _arc(lows, highs, n)
    h_first, h_last = _arc(highs, lows, n)
    a_pos = _gap_position(l_last, h_first, n, a_at)
    b_pos = _gap_position(h_last, l_first, n, b_at)
    return CombinedDiagram(g0, g1, "commutation", top, tuple(lows), tuple(highs), a_pos, b_pos)


def _arc(mine: list[int], other: list[int], n: int) -> tuple[int, int]:
    """(first, last) of ``mine`` read rightward without meeting ``other``."""
    u, v = mine
    if not any(_between(o, u, v, n) for o in other):
        return u, v
    return v, u


# ---------------------------------------------------------------------------
# pentagons and triangles


def _pentagons(cd: CombinedDiagram, fixed: list[list[int]], x: Perm) -> list[Perm]:
    """Targets of the empty pentagons out of ``x`` through ``a``.

    Rightward pentagons run along beta from x to a and on along gamma,
    with the region above; leftward ones mirror this with the region
    below.  Where the lower (upper) circle bounds the region it sweeps a
    lens, so band markings in that stretch block the pentagon.
    """
    n, s, a = cd.n, cd.s, cd.a_pos
    i = x.index(s)
    plus = [m + 0.5 for m in cd.plus_cols]
    minus = [m + 0.5 for m in cd.minus_cols]
    out = []
    for j in range(n):
        if j == i:
            continue
        h = x[j]
        if _between(a, i, j, n):
            if any(_between(m, i, a, n) for m in minus) or any(_between(m, a, j, n) for m in plus):
                continue
            cols = [(i + k) % n for k in range((j - i) % n)]
            base, height = s, (h - s) % n
        elif _between(a, j, i, n):
            if any(_between(m, a, i, n) for m in plus) or any(_between(m, j, a, n) for m in minus):
                continue
            cols = [(j + k) % n for k in range((i - j) % n)]
            base, height = h, (s - h) % n
        else:
            continue
        if any((m - base) % n < height for c in cols for m in fixed[c]):
            continue
        if any(0 < (x[c] - base) % n < height for c in cols[1:]):
            continue
        y = list(x)
        y[i], y[j] = h, s
        out.append(tuple(y))
    return out


def _pentagon_record(cd: CombinedDiagram, bidegree: Bigrading, kind: str) -> ChainMapRecord:
    fixed = cd.fixed_marks()
    return ChainMapRecord(cd.source, cd.target, bidegree, kind, lambda x: _pentagons(cd, fixed, x))


def _triangles(cd: CombinedDiagram, x: Perm) -> list[Perm]:
    n = cd.n
    i = x.index(cd.s)
    p, q = cd.plus_cols[0], cd.minus_cols[0]
    if cd.sigma(i) == 1:
        blocked = _between(p + 0.5, cd.b_pos, i, n)
    else:
        blocked = _between(q + 0.5, i, cd.b_pos, n)
    return [] if blocked else [x]


def _pinch_bidegree(cd: CombinedDiagram) -> Bigrading:
    lower, upper = cd.target.components, cd.source.components
    return expected_bidegree(-1, lower, upper)


def pentagon_map(cd: CombinedDiagram) -> ChainMapRecord:
    """Case I pinch map counting empty pentagons through ``a``."""
    if cd.case != "I":
        raise ValueError(f"pentagon map needs a Case I diagram, got case {cd.case}")
    return _pentagon_record(cd, _pinch_bidegree(cd), "pinch-I")


def triangle_map(cd: CombinedDiagram) -> ChainMapRecord:
    """Case II pinch map counting O-free triangles through ``b``."""
    if cd.case != "II":
        raise ValueError(f"triangle map needs a Case II diagram, got case {cd.case}")
    return ChainMapRecord(
        cd.source, cd.target, _pinch_bidegree(cd), "pinch-II", lambda x: _triangles(cd, x)
    )


def pinch_map(g_plus: GridDiagram, g_minus: GridDiagram) -> ChainMapRecord:
    cd = detect_pinch(g_plus, g_minus)
    return pentagon_map(cd) if cd.case == "I" else triangle_map(cd)


# ---------------------------------------------------------------------------
# births


@dataclass(frozen=True)
class BirthData:
    """Where the new unknot went in the upper grid (0-indexed).

    ``c``/``r`` locate X1 in the lower grid.  In the upper grid the new
    columns are ``c+1, c+2`` and the new rows ``r, r+1``; ``a`` is the
    intersection (line c+1, line r+2) and ``b`` is (line c+2, line r+1).
    """

    c: int
    r: int

    @property
    def a(self) -> tuple[int, int]:
        return self.c + 1, self.r + 2

    @property
    def b(self) -> tuple[int, int]:
        return self.c + 2, self.r + 1

    def new_marks(self) -> dict[str, tuple[int, int]]:
        c, r = self.c, self.r
        return {
            "O2": (c + 1, r + 1),
            "X2": (c + 1, r),
            "X3": (c + 2, r + 1),
            "O3": (c + 2, r),
        }


def birth_insert(g_minus: GridDiagram, x1_column: int) -> tuple[GridDiagram, BirthData]:
    """Insert a split tb=-1 unknot just below and right of the X in
    column ``x1_column`` (1-indexed)."""
    n = g_minus.n
    if not 1 <= x1_column <= n:
        raise IllegalMoveError(f"column {x1_column} outside 1..{n}")
    c = x1_column - 1
    r = g_minus.xs[c]

    def row(v):
        return v + 2 if v >= r else v

    xs, os_ = [], []
    for col in range(n):
        xs.append(row(g_minus.xs[col]))
        os_.append(row(g_minus.os[col]))
        if col == c:
            xs.extend([r, r + 1])
            os_.extend([r + 1, r])
    return GridDiagram.from_zero_based(xs, os_), BirthData(c, r)


def _birth_psi(gp: GridDiagram, d: BirthData, x: Perm) -> list[Perm]:
    """Rectangles from x in NB to AB holding exactly the four new
    markings and, inside, exactly the point b."""
    N = gp.n
    (ac, ar), (bc, br) = d.a, d.b
    if x[bc] != br or x[ac] == ar:
        return []
    marks = d.new_marks()
    want_o = {marks["O2"], marks["O3"]}
    want_x = {marks["X2"], marks["X3"]}
    out = []
    for i in range(N):
        for j in range(N):
            if i == j:
                continue
            bottom, top = x[i], x[j]
            # a must become a corner of y
            if not ((i == ac and top == ar) or (j == ac and bottom == ar)):
                continue
            width, height = (j - i) % N, (top - bottom) % N
            cols = [(i + k) % N for k in range(width)]
            o_in = {(col, gp.os[col]) for col in cols if (gp.os[col] - bottom) % N < height}
            if o_in != want_o:
                continue
            x_in = {(col, gp.xs[col]) for col in cols if (gp.xs[col] - bottom) % N < height}
            if x_in != want_x:
                continue
            inside = {col for col in cols[1:] if 0 < (x[col] - bottom) % N < height}
            if inside != {bc}:
                continue
            y = list(x)
            y[i], y[j] = top, bottom
            out.append(tuple(y))
    return out


def _birth_e(d: BirthData, y: Perm) -> Perm:
    """Drop a and b and relabel the remaining lines."""
    skip = {d.c + 1, d.c + 2}
    return tuple(v if v <= d.r else v - 2 for k, v in enumerate(y) if k not in skip)


def birth_map(g_plus: GridDiagram, g_minus: GridDiagram, data: BirthData) -> ChainMapRecord:
    """phi = e . psi . Pi from the upper grid to the lower grid."""
    if g_plus.n != g_minus.n + 2:
        raise ValueError("upper grid must have two more columns than the lower grid")

    def rule(x):
        return [_birth_e(data, y) for y in _birth_psi(g_plus, data, x)]

    return ChainMapRecord(g_plus, g_minus, Bigrading(1, 0), "birth", rule)


# ---------------------------------------------------------------------------
# isotopies


def _translation_record(g1: GridDiagram, dx: int, dy: int) -> ChainMapRecord:
    """Relabeling from g1 to g0 = translate(g1, dx, dy)."""
    n = g1.n
    g0 = cyclic_translate(g1, dx, dy)

    def rule(y):
        x = [0] * n
        for c in range(n):
            x[(c + dx) % n] = (y[c] + dy) % n
        return [tuple(x)]

    return ChainMapRecord(g1, g0, Bigrading(0, 0), "translate", rule)


def _invert(perm: Perm) -> Perm:
    inv = [0] * len(perm)
    for c, r in enumerate(perm):
        inv[r] = c
    return tuple(inv)


def isotopy_map(g0: GridDiagram, move: dict) -> ChainMapRecord:
    """Chain map from ``g0`` to the grid produced by a translation or
    commutation ``move`` (same dict format as script steps)."""
    name = move.get("move")
    if name == "cyclic_translate":
        dx, dy = int(move.get("dx", 0)), int(move.get("dy", 0))
        return _translation_record(g0, dx, dy)
    if name == "commute_rows":
        cd = commutation_diagram(g0, int(move["r"]))
        return _pentagon_record(cd, Bigrading(0, 0), "commute-rows")
    if name == "commute_columns":
        c = int(move["c"])
        inner = isotopy_map(transpose(g0), {"move": "commute_rows", "r": c})
        g1 = commute_columns(g0, c)
        return ChainMapRecord(
            g0,
            g1,
            Bigrading(0, 0),
            "commute-columns",
            lambda x: [_invert(y) for y in inner(_invert(x))],
        )
    raise IllegalMoveError(f"{name!r} is not a translation or commutation")


# ---------------------------------------------------------------------------
# scripts

_MOVES = {
    "cyclic_translate": ("dx", "dy"),
    "commute_columns": ("c",),
    "commute_rows": ("r",),
    "stabilize": ("c", "type"),
    "destabilize": ("c", "type"),
    "pinch": ("row_pair", "case"),
    "birth": ("x1_column",),
}


def parse_script(data: str | list) -> list[dict]:
    """Validate a move script (JSON text or an already-parsed list)."""
    if isinstance(data, str):
        try:
            data = json.loads(data) if data.strip() else []
        except json.JSONDecodeError as exc:
            from .grid import GridFormatError

            raise GridFormatError(f"invalid script JSON: {exc.msg}", exc.lineno, exc.colno) from None
    if isinstance(data, dict) and "moves" in data:
        data = data["moves"]
    if not isinstance(data, list):
        raise ReplayError(0, "a script is a JSON list of moves")
    steps = []
    for k, rec in enumerate(data):
        if not isinstance(rec, dict) or rec.get("move") not in _MOVES:
            raise ReplayError(k, f"unknown move record {rec!r}")
        missing = [p for p in _MOVES[rec["move"]] if p not in rec]
        if rec["move"] == "cyclic_translate":
            missing = []
        if missing:
            raise ReplayError(k, f"{rec['move']} is missing {', '.join(missing)}")
        steps.append(dict(rec))
    return steps


def _row_of(rec: dict) -> int:
    rp = rec["row_pair"]
    return int(rp[0]) if isinstance(rp, (list, tuple)) else int(rp)


@dataclass
class ScriptResult:
    """Outcome of replaying a script from the lower grid upward."""

    g_minus: GridDiagram
    g_plus: GridDiagram
    grids: list[GridDiagram]
    phi: ChainMapRecord | None
    chi: int
    births: int
    pinches: int
    notes: list[str] = field(default_factory=list)

    @property
    def expected_bidegree(self) -> Bigrading:
        return expected_bidegree(self.chi, self.g_minus.components, self.g_plus.components)

    def bidegree_ok(self) -> bool | None:
        if self.phi is None:
            return None
        return self.phi.bidegree == self.expected_bidegree

    def canonical_ok(self) -> tuple[bool, bool] | None:
        if self.phi is None:
            return None
        return self.phi.preserves_canonical_classes()


def compose_script(
    g_minus: GridDiagram, script: str | list, budget: int | None = None
) -> ScriptResult:
    """Replay ``script`` from ``g_minus`` and compose the elementary maps.

    Step k turns grid k into grid k+1; its map runs from grid k+1 back to
    grid k, so the composite is applied in reverse script order.  Legendrian
    isotopy stabilizations are replayed but break the composite; the
    vanishing of x+ and x- is compared across them instead.
    """
    from .complex import STABILIZATION_SIGN

    steps = parse_script(script)
    grids = [g_minus]
    maps: list[ChainMapRecord] = []
    notes: list[str] = []
    composable = True
    births = pinches = 0
    for k, rec in enumerate(steps):
        g = grids[-1]
        name = rec["move"]
        try:
            if name == "cyclic_translate":
                dx, dy = int(rec.get("dx", 0)), int(rec.get("dy", 0))
                nxt = cyclic_translate(g, dx, dy)
                f = _translation_record(nxt, -dx, -dy)
            elif name == "commute_columns":
                nxt = commute_columns(g, int(rec["c"]))
                f = isotopy_map(nxt, {"move": "commute_columns", "c": int(rec["c"])})
            elif name == "commute_rows":
                nxt = commute_rows(g, int(rec["r"]))
                f = isotopy_map(nxt, {"move": "commute_rows", "r": int(rec["r"])})
            elif name in ("stabilize", "destabilize"):
                kind = rec["type"]
                if kind not in STABILIZATION_SIGN:
                    raise IllegalMoveError(f"unknown stabilization type {kind!r}")
                if STABILIZATION_SIGN[kind]:
                    raise IllegalMoveError(
                        f"{kind} changes tb and r, so it is not a Legendrian isotopy"
                    )
                move = stabilize if name == "stabilize" else destabilize
                nxt = move(g, int(rec["c"]), kind)
                _check_vanishing_across(g, nxt, k, budget, notes)
                f = None
            elif name == "pinch":
                nxt = pinch(g, _row_of(rec), str(rec["case"]))
                f = pinch_map(nxt, g)
                pinches += 1
            else:  # birth
                nxt, data = birth_insert(g, int(rec["x1_column"]))
                f = birth_map(nxt, g, data)
                births += 1
        except GridError as exc:
            if isinstance(exc, ReplayError):
                raise
            raise ReplayError(k, str(exc)) from None
        grids.append(nxt)
        if f is None:
            if composable:
                notes.append(f"no composite map: step {k} ({name} {rec['type']}) has no chain map")
            composable = False
        else:
            maps.append(f)
    phi = None
    if composable:
        phi = identity_map(grids[-1])
        for f in reversed(maps):
            phi = phi.then(f)
        if maps:
            phi.kind = "composite" if len(maps) > 1 else maps[0].kind
    return ScriptResult(g_minus, grids[-1], grids, phi, births - pinches, births, pinches, notes)


def _check_vanishing_across(g, nxt, step, budget, notes):
    from .f2 import class_is_zero

    for sign in "+-":
        before = class_is_zero(g, sign, budget).verdict
        after = class_is_zero(nxt, sign, budget).verdict
        if before != after:
            raise AssertionError(
                f"step {step}: lambda{sign} changed from {before} to {after} across an isotopy"
            )
        notes.append(f"step {step}: lambda{sign} {before} on both sides")
