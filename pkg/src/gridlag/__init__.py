"""Tilde grid homology, Legendrian GRID invariants and decomposable-cobordism maps."""

from .grid import GridDiagram, parse_grid, serialize_grid
from .complex import Bigrading, canonical_cycles, classical_invariants, gradings
from .kernels import BACKEND, BudgetExceeded
from .f2 import VanishingCertificate, class_is_zero, homology_dimensions, is_boundary
from .cobordism import ChainMapRecord, compose_script
from .obstruction import ObstructionReport, filling_obstruction, grid_obstruction, obstruct

__version__ = "0.1.0"

__all__ = [
    "GridDiagram",
    "parse_grid",
    "serialize_grid",
    "Bigrading",
    "gradings",
    "canonical_cycles",
    "classical_invariants",
    "BACKEND",
    "BudgetExceeded",
    "VanishingCertificate",
    "class_is_zero",
    "homology_dimensions",
    "is_boundary",
    "ChainMapRecord",
    "compose_script",
    "ObstructionReport",
    "obstruct",
    "grid_obstruction",
    "filling_obstruction",
]
