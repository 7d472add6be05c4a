"""Obstructions to decomposable Lagrangian cobordisms and fillings.

Two layers: the classical constraint (rotation numbers agree and
tb(L+) - tb(L-) = -chi) and the GRID layer, which compares the vanishing of
the canonical classes at the two ends.  "not obstructed" never means a
cobordism exists.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .complex import classical_invariants
from .f2 import VanishingCertificate, class_is_zero
from .grid import GridDiagram
from .kernels import BudgetExceeded

__all__ = [
    "EndpointStatus",
    "Verdict",
    "ObstructionReport",
    "classical_feasibility",
    "vanishing_statuses",
    "grid_obstruction",
    "filling_obstruction",
    "obstruct",
]

OBSTRUCTED = "obstructed"
NOT_OBSTRUCTED = "not obstructed"
INCONCLUSIVE = "inconclusive"
CONSISTENT = "consistent"

# The two GRID bullets: the upper end has vanishing class while the lower
# end does not.
_BULLETS = {
    "+": "lambda+ bullet: lambda+(upper) = 0 and lambda+(lower) != 0",
    "-": "lambda- bullet: lambda-(upper) = 0 and lambda-(lower) != 0",
}


@dataclass
class Verdict:
    status: str
    reasons: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {"status": self.status, "reasons": list(self.reasons)}


@dataclass
class EndpointStatus:
    """Classical data and canonical-class statuses of one grid."""

    grid: GridDiagram
    tb: int
    r: int
    components: int
    status: dict[str, str] = field(default_factory=dict)
    certificates: dict[str, VanishingCertificate] = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)

    @classmethod
    def classical(cls, g: GridDiagram) -> "EndpointStatus":
        tb, r, comps = classical_invariants(g)
        return cls(g, tb, r, comps)

    def to_json(self) -> dict:
        return {
            "n": self.grid.n,
            "tb": self.tb,
            "r": self.r,
            "components": self.components,
            "lambda_plus": self.status.get("+"),
            "lambda_minus": self.status.get("-"),
            "certificates": {s: c.to_json() for s, c in sorted(self.certificates.items())},
            "notes": list(self.notes),
        }


def _decide(g: GridDiagram, sign: str, budget: int | None):
    try:
        cert = class_is_zero(g, sign, budget)
    except BudgetExceeded as exc:
        return INCONCLUSIVE, None, str(exc)
    return cert.verdict, cert, None


def vanishing_statuses(
    endpoints: list[EndpointStatus], budget: int | None = None, threads: int = 1, signs: str = "+-"
) -> None:
    """Fill in the lambda statuses of ``endpoints`` in place.

    The jobs are independent; with ``threads > 1`` they run in a pool but
    the results are the same.
    """
    jobs = [(e, s) for e in endpoints for s in signs]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(lambda job: _decide(job[0].grid, job[1], budget), jobs))
    else:
        results = [_decide(e.grid, s, budget) for e, s in jobs]
    for (e, s), (status, cert, note) in zip(jobs, results):
        e.status[s] = status
        if cert is not None:
            e.certificates[s] = cert
        if note:
            e.notes.append(f"lambda{s}: {note}")


def classical_feasibility(
    lower: EndpointStatus | GridDiagram,
    upper: EndpointStatus | GridDiagram,
    genus: int | None = None,
) -> Verdict:
    """Check r(L+) = r(L-) and, for knots with a given genus, chi = -2g,
    where chi = tb(L-) - tb(L+) is the Euler characteristic forced by tb."""
    lo = lower if isinstance(lower, EndpointStatus) else EndpointStatus.classical(lower)
    up = upper if isinstance(upper, EndpointStatus) else EndpointStatus.classical(upper)
    if genus is not None and genus < 0:
        raise ValueError("genus must be nonnegative")
    chi = lo.tb - up.tb
    reasons = []
    if lo.r != up.r:
        reasons.append(f"rotation mismatch: r(lower)={lo.r} but r(upper)={up.r}")
    if genus is not None and lo.components == 1 and up.components == 1 and chi != -2 * genus:
        reasons.append(
            f"tb mismatch: tb(upper)-tb(lower)={up.tb - lo.tb} but a genus {genus} surface "
            f"needs {2 * genus}"
        )
    if reasons:
        return Verdict(OBSTRUCTED, reasons)
    return Verdict(CONSISTENT, [f"required chi = {chi}"])


def _grid_verdict(lo: EndpointStatus, up: EndpointStatus) -> Verdict:
    fired, open_ = [], []
    for s in "+-":
        u, l = up.status.get(s), lo.status.get(s)
        if u == "zero" and l == "nonzero":
            fired.append(_BULLETS[s])
        elif INCONCLUSIVE in (u, l) and u != "nonzero" and l != "zero":
            open_.append(f"lambda{s} bullet undecided within budget")
    if fired:
        return Verdict(OBSTRUCTED, fired)
    if open_:
        return Verdict(INCONCLUSIVE, open_)
    return Verdict(NOT_OBSTRUCTED, ["neither bullet applies"])


def grid_obstruction(
    g_minus: GridDiagram, g_plus: GridDiagram, budget: int | None = None, threads: int = 1
) -> tuple[Verdict, EndpointStatus, EndpointStatus]:
    """GRID-invariant obstruction to a decomposable cobordism from the
    lower Legendrian ``g_minus`` to the upper one ``g_plus``."""
    lo, up = EndpointStatus.classical(g_minus), EndpointStatus.classical(g_plus)
    vanishing_statuses([lo, up], budget, threads)
    return _grid_verdict(lo, up), lo, up


def filling_obstruction(
    g: GridDiagram, budget: int | None = None, threads: int = 1
) -> tuple[Verdict, EndpointStatus]:
    """A decomposable filling forces both canonical classes to be nonzero."""
    e = EndpointStatus.classical(g)
    vanishing_statuses([e], budget, threads)
    zero = [s for s in "+-" if e.status[s] == "zero"]
    if zero:
        return Verdict(OBSTRUCTED, [f"lambda{s} = 0" for s in zero]), e
    if INCONCLUSIVE in e.status.values():
        return Verdict(INCONCLUSIVE, ["a canonical class was undecided within budget"]), e
    return Verdict(NOT_OBSTRUCTED, ["both canonical classes are nonzero"]), e


@dataclass
class ObstructionReport:
    lower: EndpointStatus
    upper: EndpointStatus
    classical: Verdict
    grid: Verdict
    genus: int | None = None

    @property
    def combined(self) -> str:
        if OBSTRUCTED in (self.classical.status, self.grid.status):
            return OBSTRUCTED
        if self.grid.status == INCONCLUSIVE:
            return INCONCLUSIVE
        return NOT_OBSTRUCTED

    def certificates_verify(self) -> bool:
        return all(
            c.verify() for e in (self.lower, self.upper) for c in e.certificates.values()
        )

    def to_json(self) -> dict:
        return {
            "lower": self.lower.to_json(),
            "upper": self.upper.to_json(),
            "genus": self.genus,
            "classical": self.classical.to_json(),
            "grid": self.grid.to_json(),
            "combined": self.combined,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, indent=2)

    def to_text(self) -> str:
        lines = []
        for name, e in (("lower", self.lower), ("upper", self.upper)):
            lines.append(
                f"{name}: n={e.grid.n} tb={e.tb} r={e.r} components={e.components} "
                f"lambda+={e.status.get('+')} lambda-={e.status.get('-')}"
            )
            lines.extend(f"  note: {note}" for note in e.notes)
        lines.append(f"classical: {self.classical.status}")
        lines.extend(f"  {r}" for r in self.classical.reasons)
        lines.append(f"grid: {self.grid.status}")
        lines.extend(f"  {r}" for r in self.grid.reasons)
        lines.append(f"combined: {self.combined}")
        return "\n".join(lines) + "\n"


def obstruct(
    g_minus: GridDiagram,
    g_plus: GridDiagram,
    genus: int | None = None,
    budget: int | None = None,
    threads: int = 1,
) -> ObstructionReport:
    """Full report for a cobordism from ``g_minus`` (bottom) to ``g_plus`` (top)."""
    grid, lo, up = grid_obstruction(g_minus, g_plus, budget, threads)
    classical = classical_feasibility(lo, up, genus)
    return ObstructionReport(lo, up, classical, grid, genus)
