"""Exact verification of superintegrable systems.

Classical constants of the motion are built from action-angle data and
checked by exact Poisson brackets; quantum symmetries of the caged
oscillator come from a lattice recurrence and are checked by exact
commutators. A floating-point oracle shadows the exact results.
"""

from .algebra import Algebra, ChartElement, NotClosed, ParseError, StructuralError
from .classical import catalog, catalog_spec, construct_constant, poisson_bracket
from .diffop import DiffOperator, commutator, parse_operator
from .lattice import build_operator, generic_elimination, lattice_march
from .system import SystemSpec, caged_oscillator

__version__ = "0.1.0"

__all__ = [
    "Algebra",
    "ChartElement",
    "DiffOperator",
    "NotClosed",
    "ParseError",
    "StructuralError",
    "SystemSpec",
    "build_operator",
    "caged_oscillator",
    "catalog",
    "catalog_spec",
    "commutator",
    "construct_constant",
    "generic_elimination",
    "lattice_march",
    "parse_operator",
    "poisson_bracket",
    "__version__",
]
