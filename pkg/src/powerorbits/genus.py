"""Genera of superelliptic curves y^m = f(x) and of the curves C_n : y^m = phi^n(x).

Only multiplicities matter: a profile is a multiset of (exponent, number of
conjugate points) pairs for the finite zeros and poles of f. Since the genus
depends on exponents only modulo m, the profile of phi^n is read off its
PowerClass rather than the expanded iterate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Tuple

from .arith import DEFAULT_BUDGET, FactorBudget
from .powerclass import IterateRelation, PowerClass, _signed_layers, find_relation, iterate_classes
from .qpoly import UniPoly
from .ratmap import DEFAULT_DEGREE_BUDGET, RationalMap


@dataclass(frozen=True)
class MultiplicityProfile:
    """(signed exponent, count) pairs of the finite zeros and poles of f, for y^m = f."""

    m: int
    entries: Tuple[Tuple[int, int], ...]

    def __post_init__(self):
        if self.m < 2:
            raise ValueError("m must be at least 2")
        for e, c in self.entries:
            if e == 0 or c < 1:
                raise ValueError(f"bad profile entry {(e, c)}")

    @classmethod
    def of(cls, m: int, entries) -> "MultiplicityProfile":
        return cls(m, tuple(sorted((int(e), int(c)) for e, c in entries)))

    @property
    def k(self) -> int:
        return sum(c for _, c in self.entries)

    @property
    def a(self) -> int:
        g = self.m
        for e, _ in self.entries:
            g = math.gcd(g, e)
        return g

    @property
    def m_prime(self) -> int:
        return self.m // self.a

    @property
    def t(self) -> int:
        """Finite points whose exponent is not divisible by m."""
        return sum(c for e, c in self.entries if e % self.m)


def superelliptic_genus(profile: MultiplicityProfile) -> int:
    """g = 1 + (k-1) m'/2 - (gcd(m', sum e') + sum gcd(m', e'_i))/2."""
    if profile.k == 0:
        return 0
    a, mp = profile.a, profile.m_prime
    total = sum(e * c for e, c in profile.entries) // a
    twice = 2 + (profile.k - 1) * mp - math.gcd(mp, total) - sum(c * math.gcd(mp, e // a) for e, c in profile.entries)
    if twice % 2 or twice < 0:
        raise AssertionError(f"genus formula gave non-integral or negative value {twice}/2")
    return twice // 2


def genuscor_bounds(profile: MultiplicityProfile) -> Tuple[int, int]:
    """(ceil(t/2 - 1), floor((m-1)(t-1)/2)); both 0 when t = 0."""
    t, m = profile.t, profile.m
    if t == 0:
        return 0, 0
    return -((2 - t) // 2), ((m - 1) * (t - 1)) // 2


def rhocor_bounds(rho: int, m: int) -> Tuple[int, int]:
    """(ceil((rho-3)/2), floor((m-1)(rho-1)/2)); both 0 when rho = 0."""
    if rho == 0:
        return 0, 0
    return -((3 - rho) // 2), ((m - 1) * (rho - 1)) // 2


def profile_from_class(cls: PowerClass) -> MultiplicityProfile:
    return MultiplicityProfile.of(cls.m, [(r, f.degree) for r, f in cls.factors])


def profile_from_function(num: UniPoly, den: UniPoly, m: int) -> MultiplicityProfile:
    """Profile of num/den from its full Yun decomposition (no reduction mod m)."""
    _, layers = _signed_layers(num, den)
    acc: dict = {}
    for e, f in layers:
        acc[e] = acc.get(e, 0) + f.degree
    return MultiplicityProfile.of(m, acc.items())


def genus_of_Cn(
    phi: RationalMap,
    m: int,
    n: int,
    budget: FactorBudget = DEFAULT_BUDGET,
    degree_budget: int = DEFAULT_DEGREE_BUDGET,
) -> int:
    """Genus of y^m = phi^n(x), computed from the class of phi^n."""
    if n < 1:
        raise ValueError("n must be at least 1")
    cls = iterate_classes(phi, m, n, budget, degree_budget)[-1]
    return superelliptic_genus(profile_from_class(cls))


@dataclass(frozen=True)
class RhoDetail:
    total: int
    finite: Tuple[Tuple[int, int], ...]
    infinity: bool


def rho_from_class(cls: PowerClass) -> RhoDetail:
    finite = tuple((r, f.degree) for r, f in cls.factors)
    inf = cls.infinity_in_support()
    return RhoDetail(sum(d for _, d in finite) + (1 if inf else 0), finite, inf)


def rho_n(
    phi: RationalMap,
    m: int,
    n: int,
    budget: FactorBudget = DEFAULT_BUDGET,
    degree_budget: int = DEFAULT_DEGREE_BUDGET,
) -> RhoDetail:
    """Number of points of phi^{-n}({0, inf}) whose multiplicity is not divisible by m."""
    if n < 1:
        raise ValueError("n must be at least 1")
    return rho_from_class(iterate_classes(phi, m, n, budget, degree_budget)[-1])


@dataclass(frozen=True)
class GenusRow:
    n: int
    genus: int
    rho: int
    t: int
    genuscor: Tuple[int, int]
    rhocor: Tuple[int, int]

    @property
    def bounds_hold(self) -> bool:
        lo, hi = self.genuscor
        rlo, rhi = self.rhocor
        return lo <= self.genus <= hi and rlo <= self.genus <= rhi

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "genus": self.genus,
            "rho": self.rho,
            "t": self.t,
            "genuscor": list(self.genuscor),
            "rhocor": list(self.rhocor),
            "bounds_hold": self.bounds_hold,
        }


@dataclass(frozen=True)
class GenusReport:
    m: int
    rows: Tuple[GenusRow, ...]
    verdict: str
    relation: Optional[IterateRelation]
    ratios: Tuple[Optional[Fraction], ...] = field(default=())

    def to_json(self) -> dict:
        return {
            "m": self.m,
            "verdict": self.verdict,
            "relation": self.relation.to_json() if self.relation else None,
            "rows": [r.to_json() for r in self.rows],
            "ratios": [None if q is None else str(q) for q in self.ratios],
        }


def genus_table(
    phi: RationalMap,
    m: int,
    N: int,
    budget: FactorBudget = DEFAULT_BUDGET,
    degree_budget: int = DEFAULT_DEGREE_BUDGET,
) -> List[GenusRow]:
    rows = []
    for n, cls in enumerate(iterate_classes(phi, m, N, budget, degree_budget), start=1):
        prof = profile_from_class(cls)
        rho = rho_from_class(cls).total
        rows.append(GenusRow(n, superelliptic_genus(prof), rho, prof.t, genuscor_bounds(prof), rhocor_bounds(rho, m)))
    return rows


def dichotomy_report(
    phi: RationalMap,
    m: int,
    N: int,
    budget: FactorBudget = DEFAULT_BUDGET,
    degree_budget: int = DEFAULT_DEGREE_BUDGET,
) -> GenusReport:
    """Genus table for n = 1..N with a bounded/growing verdict."""
    if N < 2:
        raise ValueError("N must be at least 2")
    rows = genus_table(phi, m, N, budget, degree_budget)
    for row in rows:
        if not row.bounds_hold:
            raise AssertionError(f"genus bounds violated at n = {row.n}")
    rel = find_relation(phi, m, budget=budget, degree_budget=degree_budget)
    if rel is not None:
        if any(row.genus > 1 for row in rows):
            raise AssertionError("bounded class sequence with genus above 1")
        return GenusReport(m, tuple(rows), "bounded", rel)
    ratios = tuple(
        Fraction(b.genus, a.genus) if a.genus else None for a, b in zip(rows, rows[1:])
    )
    return GenusReport(m, tuple(rows), "growing", None, ratios)
