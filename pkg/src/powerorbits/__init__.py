"""m-th powers in orbits of rational maps over Q.

Exact arithmetic throughout: polynomials over Q, rational maps on P^1(Q),
classes of functions modulo m-th powers, genera of y^m = phi^n(x),
post-critical structure, and certified index sets of m-th powers in orbits.
"""

from .arith import BudgetError
from .qpoly import UniPoly
from .ratmap import INFINITY, ProjectivePoint, RationalMap, iterate_map, make_map

__all__ = ["BudgetError", "INFINITY", "ProjectivePoint", "RationalMap", "UniPoly", "iterate_map", "make_map"]
