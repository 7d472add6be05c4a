"""Grid diagrams: data model, text/JSON formats and combinatorial moves.

Coordinates follow the printed XO lists: ``x_row[c]`` is the (1-indexed)
row of the X marking in column ``c``; rows count bottom to top.  Internally
everything else in the package works 0-indexed on the lifted fundamental
domain, where the square in column ``c`` and row ``r`` has lower-left
corner ``(c, r)`` and the grid lines sit at integers ``0..n-1``.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from functools import cached_property

__all__ = [
    "GridDiagram",
    "GridError",
    "GridFormatError",
    "IllegalMoveError",
    "STABILIZATION_TYPES",
    "parse_grid",
    "serialize_grid",
    "grid_from_json",
    "grid_to_json",
    "component_count",
    "cyclic_translate",
    "commute_columns",
    "commute_rows",
    "is_legal_column_commutation",
    "is_legal_row_commutation",
    "stabilize",
    "destabilize",
    "transpose",
    "reverse_orientation",
    "ascii_grid",
    "pinch",
    "pinch_window",
    "PinchWindow",
]

STABILIZATION_TYPES = ("X:NW", "X:NE", "X:SW", "X:SE")


class GridError(ValueError):
    """Invalid grid data."""


class GridFormatError(GridError):
    """Text that does not parse as a grid; carries a 1-based line/column."""

    def __init__(self, message: str, line: int = 1, column: int = 1):
        super().__init__(f"{line}:{column}: {message}")
        self.line = line
        self.column = column


class IllegalMoveError(GridError):
    """A grid move whose preconditions fail on the given grid."""


@dataclass(frozen=True)
class GridDiagram:
    """Toroidal n x n grid with one X and one O in every row and column."""

    x_row: tuple[int, ...]
    o_row: tuple[int, ...]

    def __post_init__(self):
        x = tuple(int(v) for v in self.x_row)
        o = tuple(int(v) for v in self.o_row)
        object.__setattr__(self, "x_row", x)
        object.__setattr__(self, "o_row", o)
        if len(x) != len(o):
            raise GridError(f"length mismatch: X has {len(x)} entries, O has {len(o)}")
        n = len(x)
        if n < 2:
            raise GridError(f"grid number must be at least 2, got {n}")
        for name, seq in (("X", x), ("O", o)):
            if sorted(seq) != list(range(1, n + 1)):
                raise GridError(f"{name} is not a permutation of 1..{n}: {list(seq)}")
        for c in range(n):
            if x[c] == o[c]:
                raise GridError(f"shared square in column {c + 1}: X and O both in row {x[c]}")

    @classmethod
    def from_zero_based(cls, xs, os) -> "GridDiagram":
        return cls(tuple(v + 1 for v in xs), tuple(v + 1 for v in os))

    @property
    def n(self) -> int:
        return len(self.x_row)

    @cached_property
    def xs(self) -> tuple[int, ...]:
        """0-indexed X rows by column."""
        return tuple(v - 1 for v in self.x_row)

    @cached_property
    def os(self) -> tuple[int, ...]:
        """0-indexed O rows by column."""
        return tuple(v - 1 for v in self.o_row)

    @cached_property
    def x_col_of_row(self) -> tuple[int, ...]:
        inv = [0] * self.n
        for c, r in enumerate(self.xs):
            inv[r] = c
        return tuple(inv)

    @cached_property
    def o_col_of_row(self) -> tuple[int, ...]:
        inv = [0] * self.n
        for c, r in enumerate(self.os):
            inv[r] = c
        return tuple(inv)

    @cached_property
    def components(self) -> int:
        return component_count(self)

    def __str__(self) -> str:
        return serialize_grid(self)


# ---------------------------------------------------------------------------
# text and JSON formats

_LIST_RE = re.compile(r"([XxOo])\s*[=:]?\s*([\[{(])([^\]})]*)([\]})])")


def _offset_to_linecol(text: str, offset: int) -> tuple[int, int]:
    line = text.count("\n", 0, offset) + 1
    col = offset - (text.rfind("\n", 0, offset) + 1) + 1
    return line, col


def parse_grid(text: str) -> GridDiagram:
    """Parse ``X={...} O={...}`` (brackets or braces; commas or spaces).

    A JSON object ``{"n":..,"x":[..],"o":[..]}`` is accepted as well.
    """
    stripped = text.strip()
    if stripped.startswith("{") and '"x"' in stripped:
        try:
            return grid_from_json(json.loads(stripped))
        except json.JSONDecodeError as exc:
            raise GridFormatError(exc.msg, exc.lineno, exc.colno) from None

    found: dict[str, list[int]] = {}
    pos = 0
    for m in _LIST_RE.finditer(text):
        gap = text[pos:m.start()]
        if gap.strip() and not gap.strip().startswith("#"):
            line, col = _offset_to_linecol(text, pos + (len(gap) - len(gap.lstrip())))
            raise GridFormatError(f"unexpected text {gap.strip()[:20]!r}", line, col)
        label = m.group(1).upper()
        if label in found:
            line, col = _offset_to_linecol(text, m.start())
            raise GridFormatError(f"duplicate {label} list", line, col)
        body = m.group(3)
        values = []
        for tok in re.finditer(r"[^,\s]+", body):
            try:
                values.append(int(tok.group()))
            except ValueError:
                line, col = _offset_to_linecol(text, m.start(3) + tok.start())
                raise GridFormatError(f"not an integer: {tok.group()!r}", line, col) from None
        found[label] = values
        pos = m.end()
    tail = text[pos:]
    if tail.strip() and not tail.strip().startswith("#"):
        line, col = _offset_to_linecol(text, pos + (len(tail) - len(tail.lstrip())))
        raise GridFormatError(f"unexpected text {tail.strip()[:20]!r}", line, col)
    for label in ("X", "O"):
        if label not in found:
            line, col = _offset_to_linecol(text, len(text))
            raise GridFormatError(f"missing {label} list", line, col)
    return GridDiagram(tuple(found["X"]), tuple(found["O"]))


def serialize_grid(g: GridDiagram) -> str:
    return "X={%s} O={%s}" % (",".join(map(str, g.x_row)), ",".join(map(str, g.o_row)))


def grid_to_json(g: GridDiagram) -> dict:
    return {"n": g.n, "x": list(g.x_row), "o": list(g.o_row)}


def grid_from_json(obj: dict) -> GridDiagram:
    try:
        x, o = obj["x"], obj["o"]
    except (KeyError, TypeError):
        raise GridError('grid JSON needs "x" and "o" lists') from None
    g = GridDiagram(tuple(x), tuple(o))
    if "n" in obj and obj["n"] != g.n:
        raise GridError(f'"n" is {obj["n"]} but the lists have length {g.n}')
    return g


def ascii_grid(g: GridDiagram) -> str:
    """Top row first; for logs only."""
    lines = []
    for r in reversed(range(g.n)):
        cells = []
        for c in range(g.n):
            cells.append("X" if g.xs[c] == r else "O" if g.os[c] == r else ".")
        lines.append(" ".join(cells))
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# link tracing


def component_count(g: GridDiagram) -> int:
    """Number of cycles of the column map c -> column of the X in O's row."""
    nxt = [g.x_col_of_row[g.os[c]] for c in range(g.n)]
    seen = [False] * g.n
    count = 0
    for start in range(g.n):
        if seen[start]:
            continue
        count += 1
        c = start
        while not seen[c]:
            seen[c] = True
            c = nxt[c]
    return count


# ---------------------------------------------------------------------------
# moves


def cyclic_translate(g: GridDiagram, dx: int, dy: int) -> GridDiagram:
    """Shift every marking right by ``dx`` and up by ``dy`` on the torus."""
    n = g.n
    xs = [0] * n
    os_ = [0] * n
    for c in range(n):
        xs[(c + dx) % n] = (g.xs[c] + dy) % n
        os_[(c + dx) % n] = (g.os[c] + dy) % n
    return GridDiagram.from_zero_based(xs, os_)


def reverse_orientation(g: GridDiagram) -> GridDiagram:
    """Swap X and O: the same Legendrian with the opposite orientation."""
    return GridDiagram(g.o_row, g.x_row)


def transpose(g: GridDiagram) -> GridDiagram:
    """Reflect across the diagonal (rows become columns)."""
    return GridDiagram.from_zero_based(g.x_col_of_row, g.o_col_of_row)


def _interleaved(a: tuple[int, int], b: tuple[int, int]) -> bool:
    """Intervals neither nested nor disjoint; a shared endpoint counts."""
    if set(a) & set(b):
        return True
    lo, hi = sorted(a)
    inside = [lo < v < hi for v in b]
    return inside[0] != inside[1]


def is_legal_column_commutation(g: GridDiagram, c: int) -> bool:
    """``c`` is 0-indexed; columns c and c+1 (mod n)."""
    d = (c + 1) % g.n
    return not _interleaved((g.xs[c], g.os[c]), (g.xs[d], g.os[d]))


def is_legal_row_commutation(g: GridDiagram, r: int) -> bool:
    s = (r + 1) % g.n
    return not _interleaved(
        (g.x_col_of_row[r], g.o_col_of_row[r]), (g.x_col_of_row[s], g.o_col_of_row[s])
    )


def commute_columns(g: GridDiagram, c: int) -> GridDiagram:
    """Swap columns ``c`` and ``c+1`` (1-indexed, cyclic)."""
    c0 = _index(g, c)
    if not is_legal_column_commutation(g, c0):
        raise IllegalMoveError(f"columns {c} and {c0 % g.n + 2 if c0 + 1 < g.n else 1} interleave")
    d0 = (c0 + 1) % g.n
    xs, os_ = list(g.xs), list(g.os)
    xs[c0], xs[d0] = xs[d0], xs[c0]
    os_[c0], os_[d0] = os_[d0], os_[c0]
    return GridDiagram.from_zero_based(xs, os_)


def commute_rows(g: GridDiagram, r: int) -> GridDiagram:
    """Swap rows ``r`` and ``r+1`` (1-indexed, cyclic)."""
    r0 = _index(g, r)
    if not is_legal_row_commutation(g, r0):
        raise IllegalMoveError(f"rows {r} and {r0 % g.n + 2 if r0 + 1 < g.n else 1} interleave")
    return transpose(commute_columns(transpose(g), r))


def _index(g: GridDiagram, one_based: int) -> int:
    if not 1 <= one_based <= g.n:
        raise IllegalMoveError(f"index {one_based} outside 1..{g.n}")
    return one_based - 1


# Block layouts for X-type stabilization, keyed by the corner of the 2x2
# block that stays empty.  Entries are (dcol, drow) offsets inside the block
# of (O, X, X); the two X's lie on the diagonal avoiding the empty corner.
_BLOCK = {
    "X:NW": ((1, 0), (0, 0), (1, 1)),
    "X:NE": ((0, 0), (0, 1), (1, 0)),
    "X:SW": ((1, 1), (0, 1), (1, 0)),
    "X:SE": ((0, 1), (0, 0), (1, 1)),
}


def stabilize(g: GridDiagram, c: int, kind: str) -> GridDiagram:
    """Split the X in column ``c`` (1-indexed) into a 2x2 block.

    ``kind`` names the empty corner of the new block; its O sits in the
    opposite corner and two X's fill the other diagonal.  Which kinds are
    Legendrian stabilizations is recorded in ``gridlag.complex``.
    """
    if kind not in _BLOCK:
        raise IllegalMoveError(f"unknown stabilization type {kind!r}")
    c0 = _index(g, c)
    n = g.n
    r0 = g.xs[c0]
    (o_dc, o_dr), (x1_dc, x1_dr), (x2_dc, x2_dr) = _BLOCK[kind]

    def row_shift(r):
        return r + 1 if r > r0 else r

    xs = []
    os_ = []
    for col in range(n + 1):
        if col < c0:
            src = col
        elif col > c0 + 1:
            src = col - 1
        else:
            src = None
        if src is not None:
            xs.append(row_shift(g.xs[src]))
            orow = g.os[src]
            if orow == r0:
                # the O in the X's old row moves to the block row without an O
                orow = r0 + (1 - o_dr)
            else:
                orow = row_shift(orow)
            os_.append(orow)
            continue
        dc = col - c0
        xrow = r0 + (x1_dr if x1_dc == dc else x2_dr)
        xs.append(xrow)
        if o_dc == dc:
            os_.append(r0 + o_dr)
        else:
            os_.append(row_shift(g.os[c0]))
    return GridDiagram.from_zero_based(xs, os_)


def destabilize(g: GridDiagram, c: int, kind: str) -> GridDiagram:
    """Inverse of :func:`stabilize`: ``c`` is the block's left column."""
    if kind not in _BLOCK:
        raise IllegalMoveError(f"unknown stabilization type {kind!r}")
    n = g.n
    if n < 3:
        raise IllegalMoveError("cannot destabilize a grid of size 2")
    c0 = _index(g, c)
    if c0 + 1 >= n:
        raise IllegalMoveError("block must not wrap around the right edge")
    for r0 in range(n - 1):
        cand = _try_destabilize(g, c0, r0, kind)
        if cand is not None:
            return cand
    raise IllegalMoveError(f"no {kind} block with left column {c}")


def _try_destabilize(g, c0, r0, kind):
    (o_dc, o_dr), (x1_dc, x1_dr), (x2_dc, x2_dr) = _BLOCK[kind]
    want = {
        (c0 + o_dc, r0 + o_dr): "O",
        (c0 + x1_dc, r0 + x1_dr): "X",
        (c0 + x2_dc, r0 + x2_dr): "X",
    }
    for (col, row), mark in want.items():
        got = g.xs[col] if mark == "X" else g.os[col]
        if got != row:
            return None
    # rebuild and verify by re-stabilizing
    xs, os_ = [], []
    for col in range(g.n):
        if col == c0 + 1:
            continue
        if col == c0:
            xs.append(r0)
            other_o_col = c0 + (1 - o_dc)
            orow = g.os[other_o_col]
            os_.append(orow - 1 if orow > r0 + 1 else orow)
            continue
        xs.append(g.xs[col] - 1 if g.xs[col] > r0 + 1 else g.xs[col])
        orow = g.os[col]
        if orow in (r0, r0 + 1):
            orow = r0
        elif orow > r0 + 1:
            orow -= 1
        os_.append(orow)
    try:
        small = GridDiagram.from_zero_based(xs, os_)
    except GridError:
        return None
    if stabilize(small, c0 + 1, kind) != g:
        return None
    return small


# ---------------------------------------------------------------------------
# pinch surgery


@dataclass(frozen=True)
class PinchWindow:
    """The two rows of a pinch on the lower-Legendrian grid (0-indexed).

    ``low``/``top`` are the square rows below and above the special
    horizontal line ``top``.  ``p`` is the column of the special marking in
    the top row and ``q`` that of the one in the bottom row; ``c1`` and
    ``c4`` hold the other markings of those rows.  Reading rightward from
    ``c1`` the columns come in the order ``c1, p, q, c4``.
    """

    case: str
    low: int
    top: int
    c1: int
    p: int
    q: int
    c4: int


def pinch_window(g: GridDiagram, row: int, case: str) -> PinchWindow:
    """Locate and validate the pinch pattern in rows ``row``, ``row+1``.

    ``row`` is 1-indexed; the upper row wraps to 1 past the top.  Case I
    swaps the two X's between the rows and Case II the two O's.
    """
    if case not in ("I", "II"):
        raise IllegalMoveError(f"pinch case must be 'I' or 'II', got {case!r}")
    low = _index(g, row)
    top = (low + 1) % g.n
    if case == "I":
        c1, p = g.o_col_of_row[top], g.x_col_of_row[top]
        q, c4 = g.x_col_of_row[low], g.o_col_of_row[low]
    else:
        c1, p = g.x_col_of_row[top], g.o_col_of_row[top]
        q, c4 = g.o_col_of_row[low], g.x_col_of_row[low]
    n = g.n
    if not (p - c1) % n < (q - c1) % n < (c4 - c1) % n:
        kinds = "O, X, X, O" if case == "I" else "X, O, O, X"
        raise IllegalMoveError(
            f"rows {row} and {top + 1} do not show the Case {case} pinch pattern "
            f"(markings {kinds} in rightward order across top, top, bottom, bottom)"
        )
    return PinchWindow(case, low, top, c1, p, q, c4)


def pinch(g: GridDiagram, row: int, case: str) -> GridDiagram:
    """Grid of the upper Legendrian after a pinch in rows ``row``, ``row+1``."""
    w = pinch_window(g, row, case)
    xs, os_ = list(g.xs), list(g.os)
    marks = xs if case == "I" else os_
    marks[w.p], marks[w.q] = w.low, w.top
    return GridDiagram.from_zero_based(xs, os_)
