"""Toric geometry, mirror curves and Chern-Simons partition functions on lens spaces L(p,q)."""

__version__ = "0.1.0"

from .errors import BudgetExceeded, ConvergenceError, DegenerateInput, InvalidLensSpace, LensCSError
from .lattice import LensSpace, build_fan, interior_points, pq_web, topology, triangulate

__all__ = [
    "BudgetExceeded", "ConvergenceError", "DegenerateInput", "InvalidLensSpace", "LensCSError",
    "LensSpace", "build_fan", "interior_points", "pq_web", "topology", "triangulate", "__version__",
]
