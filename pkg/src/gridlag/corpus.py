"""Bundled example grids and move scripts."""

from __future__ import annotations

from importlib import resources

from .grid import GridDiagram, parse_grid


def names() -> list[str]:
    return sorted(p.name for p in resources.files(__package__).joinpath("data").iterdir()
                  if p.name.endswith((".grid", ".json")))


def read_text(name: str) -> str:
    return resources.files(__package__).joinpath("data", name).read_text()


def load_grid(name: str) -> GridDiagram:
    """``name`` with or without the ``.grid`` suffix."""
    if not name.endswith(".grid"):
        name += ".grid"
    return parse_grid(read_text(name))
