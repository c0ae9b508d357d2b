"""Explicit families of maps with their expected classification metadata.

Each constructor returns a FamilyInstance: the map, the modulus m it is studied
for, the expected type tag and orbifold signature, and when a seed is attached,
the expected index set of m-th powers along the seed's orbit.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Tuple

from .qpoly import UniPoly
from .ratmap import RationalMap, make_map

X = UniPoly.x()


@dataclass(frozen=True)
class ExpectedShape:
    """Expected {n : phi^n(seed) in P^1(Q)^m}: exceptional indices plus (offset, modulus) progressions."""

    exceptional: Tuple[int, ...] = ()
    progressions: Tuple[Tuple[int, int], ...] = ()

    def contains(self, n: int) -> bool:
        return n in self.exceptional or any(n >= l and (n - l) % M == 0 for l, M in self.progressions)


@dataclass(frozen=True)
class FamilyInstance:
    name: str
    map: RationalMap
    m: int
    tag: str
    signature: Optional[Tuple[int, ...]] = None
    seed: Optional[Fraction] = None
    shape: Optional[ExpectedShape] = None
    params: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        from .ratmap import format_map

        return {
            "name": self.name,
            "map": format_map(self.map),
            "m": self.m,
            "tag": self.tag,
            "signature": list(self.signature) if self.signature else None,
            "seed": None if self.seed is None else str(self.seed),
            "shape": None
            if self.shape is None
            else {"exceptional": list(self.shape.exceptional), "progressions": [list(p) for p in self.shape.progressions]},
            "params": {k: str(v) for k, v in self.params.items()},
        }


def _q(v) -> Fraction:
    return Fraction(v)


# ---------------------------------------------------------------------------
# Chebyshev polynomials


def chebyshev(d: int) -> UniPoly:
    """Monic T_d with T_d(z + 1/z) = z^d + z^-d."""
    if d < 0:
        raise ValueError("d must be non-negative")
    t0, t1 = UniPoly.const(2), X
    if d == 0:
        return t0
    for _ in range(d - 1):
        t0, t1 = t1, X * t1 - t0
    return t1


def chebyshev_exception_poly(d: int) -> UniPoly:
    """(-1)^d T_d(x + 2) - 2."""
    return chebyshev(d).compose(X + 2) * (-1) ** d - 2


def chebyshev_exception(d: int) -> RationalMap:
    if d < 2:
        raise ValueError("d must be at least 2")
    return make_map(chebyshev_exception_poly(d), UniPoly.const(1))


# ---------------------------------------------------------------------------
# Lattes maps


def lattes_244(B=-3) -> FamilyInstance:
    """-(x - B)^2 / (4x)."""
    B = _q(B)
    if B == 0:
        raise ValueError("B must be nonzero")
    phi = make_map(-((X - B) ** 2), 4 * X)
    seed, shape = None, None
    if B == -3:
        seed, shape = Fraction(-1), ExpectedShape((), ((1, 2),))
    return FamilyInstance("lattes_244", phi, 4, "(13)", (2, 4, 4), seed, shape, {"B": B})


def lattes_333_fixed2cycle(B=1) -> FamilyInstance:
    """(x - 2B)(x + 2B)^3 / (8 (x - B)^3)."""
    B = _q(B)
    if B == 0:
        raise ValueError("B must be nonzero")
    phi = make_map((X - 2 * B) * (X + 2 * B) ** 3, 8 * (X - B) ** 3)
    seed, shape = None, None
    if B == 1:
        seed, shape = Fraction(-1), ExpectedShape((), ((0, 2),))
    return FamilyInstance("lattes_333_fixed2cycle", phi, 3, "(2,1)", (3, 3, 3), seed, shape, {"B": B})


def lattes_333_3cycle(B=1) -> FamilyInstance:
    """2B (x - 2B)(x + 2B)^3 / (x (x - 4B)^3)."""
    B = _q(B)
    if B == 0:
        raise ValueError("B must be nonzero")
    phi = make_map(2 * B * (X - 2 * B) * (X + 2 * B) ** 3, X * (X - 4 * B) ** 3)
    seed, shape = None, None
    if B == 1:
        seed, shape = Fraction(6), ExpectedShape((), ((2, 3),))
    return FamilyInstance("lattes_333_3cycle", phi, 3, "(4)", (3, 3, 3), seed, shape, {"B": B})


def lattes_333_deg9(B=3) -> FamilyInstance:
    """(x^3 + 6Bx^2 - 24B^2x + 8B^3)^3 / (27 x (x - 2B)(x^2 - 2Bx + 4B^2)^3)."""
    B = _q(B)
    if B == 0:
        raise ValueError("B must be nonzero")
    num = (X**3 + 6 * B * X**2 - 24 * B**2 * X + 8 * B**3) ** 3
    den = 27 * X * (X - 2 * B) * (X**2 - 2 * B * X + 4 * B**2) ** 3
    phi = make_map(num, den)
    seed, shape = None, None
    if B == 3:
        seed, shape = Fraction(18), ExpectedShape((), ((1, 1),))
    return FamilyInstance("lattes_333_deg9", phi, 3, "(9)", (3, 3, 3), seed, shape, {"B": B})


# ---------------------------------------------------------------------------
# non-Lattes families for m = 2


def family_type3(C=3) -> FamilyInstance:
    """-C^2 (4x - (C+1)^2)^2 / ((x - C)(4Cx - (C+1)^2)^2)."""
    C = _q(C)
    if C in (-1, Fraction(-1, 3), 0, 1):
        raise ValueError("C must avoid -1, -1/3, 0, 1")
    k = (C + 1) ** 2
    phi = make_map(-(C**2) * (4 * X - k) ** 2, (X - C) * (4 * C * X - k) ** 2)
    seed, shape = None, None
    if C == 3:
        seed, shape = Fraction(1), ExpectedShape((), ((0, 3),))
    elif C == 2:
        seed, shape = Fraction(4), ExpectedShape((), ((0, 3), (2, 3)))
    return FamilyInstance("family_type3", phi, 2, "(3)", None, seed, shape, {"C": C})


def type3_gamma(C) -> Fraction:
    """The critical point of family_type3 outside the post-critical cycle."""
    C = _q(C)
    return (3 * C**2 + 2 * C - 1) / 4


def family_type76(t=1) -> FamilyInstance:
    """144 t^2 x (x + 3t^2) / (x - 9t^2)^2."""
    t = _q(t)
    if t == 0:
        raise ValueError("t must be nonzero")
    phi = make_map(144 * t**2 * X * (X + 3 * t**2), (X - 9 * t**2) ** 2)
    shape = ExpectedShape((0, 2), ((1, 2),))
    return FamilyInstance("family_type76", phi, 2, "(7,6)", None, t**2, shape, {"t": t})


def family_mu8(C=1, s=2) -> FamilyInstance:
    """4C(C - s)(x - C) / (x - s)^2."""
    C, s = _q(C), _q(s)
    if C == 0 or s == C:
        raise ValueError("need C != 0 and s != C")
    phi = make_map(4 * C * (C - s) * (X - C), (X - s) ** 2)
    return FamilyInstance("family_mu8", phi, 2, "(8)", None, None, None, {"C": C, "s": s})


def trivial_family(c, j: int, m: int, psi_num, psi_den=1) -> FamilyInstance:
    """c x^j psi^m with psi = psi_num / psi_den."""
    c = _q(c)
    if c == 0 or not 0 <= j < m:
        raise ValueError("need c != 0 and 0 <= j < m")
    pn = psi_num if isinstance(psi_num, UniPoly) else UniPoly.const(psi_num)
    pd = psi_den if isinstance(psi_den, UniPoly) else UniPoly.const(psi_den)
    phi = make_map(c * X**j * pn**m, pd**m)
    return FamilyInstance("trivial_family", phi, m, "trivial", None, None, None, {"c": c, "j": j, "psi": f"({pn})/({pd})"})


def remark_family(c, m: int) -> FamilyInstance:
    """c x (x + 1)^m; seed 1 hits m-th powers exactly at multiples of m when c is not a p-th power for p | m."""
    inst = trivial_family(c, 1, m, X + 1)
    return FamilyInstance("remark_family", inst.map, m, "trivial", None, Fraction(1), ExpectedShape((), ((0, m),)), inst.params)
