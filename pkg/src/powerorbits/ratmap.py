"""Rational self-maps of P^1(Q).

A map is stored as integer numerator and denominator coefficient lists that are
coprime as polynomials and jointly primitive, with positive leading coefficient
on the denominator. The point at infinity is handled through homogenized
evaluation and, for ramification data, conjugation by 1/x.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from .arith import BudgetError
from .qpoly import (
    SquarefreeDecomposition,
    UniPoly,
    ip_content,
    ip_deriv,
    ip_divmod_exact,
    ip_eval_hom,
    ip_gcd,
    ip_hom_compose,
    ip_mul,
    ip_primitive,
    ip_sub,
    ip_trim,
    ip_yun,
    poly_gcd,
    resultant,
    squarefree_part,
    yun_decompose,
)

DEFAULT_DEGREE_BUDGET = 4096


class DegreeBudgetError(BudgetError):
    """An iterate or composition would exceed the configured degree budget."""

    def __init__(self, degree: int, budget: int):
        self.degree = degree
        self.budget = budget
        super().__init__(f"degree {degree} exceeds budget {budget}")


@dataclass(frozen=True, order=True)
class ProjectivePoint:
    """Point (a : b) of P^1(Q) with gcd(a, b) = 1 and b >= 0; infinity is (1, 0)."""

    a: int
    b: int

    def __post_init__(self):
        a, b = self.a, self.b
        if a == 0 and b == 0:
            raise ValueError("(0 : 0) is not a point")
        g = math.gcd(a, b)
        if b < 0 or (b == 0 and a < 0):
            g = -g
        if g != 1:
            object.__setattr__(self, "a", a // g)
            object.__setattr__(self, "b", b // g)

    @classmethod
    def of(cls, q) -> "ProjectivePoint":
        if isinstance(q, ProjectivePoint):
            return q
        if isinstance(q, str):
            return parse_point(q)
        q = Fraction(q)
        return cls(q.numerator, q.denominator)

    @classmethod
    def infinity(cls) -> "ProjectivePoint":
        return cls(1, 0)

    def is_infinity(self) -> bool:
        return self.b == 0

    def value(self) -> Fraction:
        if self.b == 0:
            raise ValueError("infinity has no rational value")
        return Fraction(self.a, self.b)

    def height(self) -> int:
        return max(abs(self.a), abs(self.b))

    def __str__(self) -> str:
        if self.b == 0:
            return "inf"
        return str(self.a) if self.b == 1 else f"{self.a}/{self.b}"


INFINITY = ProjectivePoint(1, 0)


def parse_point(text: str) -> ProjectivePoint:
    """Parse ``inf``, an integer, or ``p/q``."""
    t = text.strip().lower()
    if t in ("inf", "infinity", "oo"):
        return INFINITY
    try:
        return ProjectivePoint.of(Fraction(t))
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"not a point of P^1(Q): {text!r}") from exc


def _common_den(coeffs: Sequence[Fraction]) -> int:
    den = 1
    for c in coeffs:
        den = den * c.denominator // math.gcd(den, c.denominator)
    return den


class RationalMap:
    """phi = p/q with coprime, jointly primitive integer p, q and lc(q) > 0."""

    __slots__ = ("num", "den", "degree")

    def __init__(self, num: Sequence[int], den: Sequence[int], _canonical: bool = False):
        num, den = ip_trim(num), ip_trim(den)
        if not den:
            raise ZeroDivisionError("denominator is zero")
        if not _canonical:
            g = ip_gcd(num, den) if num else ip_primitive(den)
            if len(g) > 1:
                num = ip_divmod_exact(num, g) if num else []
                den = ip_divmod_exact(den, g)
            c = math.gcd(ip_content(num), ip_content(den))
            if den[-1] < 0:
                c = -c
            num = [v // c for v in num]
            den = [v // c for v in den]
        object.__setattr__(self, "num", tuple(num))
        object.__setattr__(self, "den", tuple(den))
        object.__setattr__(self, "degree", max(len(num), len(den)) - 1)

    def __setattr__(self, name, value):
        raise AttributeError("RationalMap is immutable")

    # construction ---------------------------------------------------------
    @classmethod
    def identity(cls) -> "RationalMap":
        return cls((0, 1), (1,), _canonical=True)

    @classmethod
    def from_polys(cls, p, q=None) -> "RationalMap":
        return make_map(p, UniPoly.const(1) if q is None else q)

    @property
    def p(self) -> UniPoly:
        return UniPoly(self.num)

    @property
    def q(self) -> UniPoly:
        return UniPoly(self.den)

    def is_polynomial(self) -> bool:
        return len(self.den) == 1

    def is_constant(self) -> bool:
        return self.degree == 0

    # evaluation -----------------------------------------------------------
    def eval_hom(self, a: int, b: int) -> Tuple[int, int]:
        """Homogenized values (P(a, b), Q(a, b)) of degree d, not normalized."""
        d = self.degree
        num = list(self.num) + [0] * (d + 1 - len(self.num))
        den = list(self.den) + [0] * (d + 1 - len(self.den))
        return ip_eval_hom(num, a, b), ip_eval_hom(den, a, b)

    def __call__(self, point) -> ProjectivePoint:
        P = ProjectivePoint.of(point)
        if self.degree == 0:
            return ProjectivePoint.of(Fraction(self.num[0] if self.num else 0, self.den[0]))
        return ProjectivePoint(*self.eval_hom(P.a, P.b))

    def eval(self, point) -> ProjectivePoint:
        return self(point)

    def eval_function(self, v) -> Fraction:
        """Value at a finite rational point that is not a pole."""
        return self.p(v) / self.q(v)

    # algebra --------------------------------------------------------------
    def compose(self, inner: "RationalMap", degree_budget: int = DEFAULT_DEGREE_BUDGET) -> "RationalMap":
        """self o inner."""
        total = self.degree * inner.degree
        if total > degree_budget:
            raise DegreeBudgetError(total, degree_budget)
        if self.degree == 0:
            return self
        d = self.degree
        num = ip_hom_compose(self.num, inner.num, inner.den, d)
        den = ip_hom_compose(self.den, inner.num, inner.den, d)
        # homogeneous composition of coprime forms stays coprime; only contents cancel
        return _content_reduce(num, den)

    def __matmul__(self, inner: "RationalMap") -> "RationalMap":
        return self.compose(inner)

    def inverse(self) -> "RationalMap":
        """Inverse of a degree-one map (ax + b)/(cx + d) is (dx - b)/(-cx + a)."""
        if self.degree != 1:
            raise ValueError("only degree-one maps are invertible")
        b, a = (list(self.num) + [0, 0])[:2]
        d, c = (list(self.den) + [0, 0])[:2]
        return RationalMap((-b, d), (a, -c))

    # comparison / display -------------------------------------------------
    def __eq__(self, other) -> bool:
        return isinstance(other, RationalMap) and self.num == other.num and self.den == other.den

    def __hash__(self) -> int:
        return hash((self.num, self.den))

    def __str__(self) -> str:
        return format_map(self)

    def __repr__(self) -> str:
        return f"RationalMap({self})"


def _content_reduce(num: Sequence[int], den: Sequence[int]) -> RationalMap:
    num, den = ip_trim(num), ip_trim(den)
    c = math.gcd(ip_content(num), ip_content(den))
    if den[-1] < 0:
        c = -c
    return RationalMap([v // c for v in num], [v // c for v in den], _canonical=True)


def format_map(phi: RationalMap) -> str:
    p = str(phi.p)
    if phi.is_polynomial() and phi.den == (1,):
        return p
    return f"({p})/({phi.q})"


def make_map(p, q) -> RationalMap:
    """Canonical map p/q from rational polynomials (or coefficient lists)."""
    p = p if isinstance(p, UniPoly) else UniPoly(p)
    q = q if isinstance(q, UniPoly) else UniPoly(q)
    if q.is_zero():
        raise ZeroDivisionError("denominator is zero")
    if p.is_zero():
        raise ValueError("the zero map is not a self-map of P^1")
    den = _common_den(p.coeffs + q.coeffs)
    return RationalMap([int(c * den) for c in p.coeffs], [int(c * den) for c in q.coeffs])


def iterate_map(phi: RationalMap, n: int, degree_budget: int = DEFAULT_DEGREE_BUDGET) -> RationalMap:
    """phi^n; phi^0 is the identity."""
    if n < 0:
        raise ValueError("n must be non-negative")
    if n == 0:
        return RationalMap.identity()
    if phi.degree >= 2 and n > math.log2(degree_budget) + 1:
        raise DegreeBudgetError(phi.degree**n, degree_budget)
    if phi.degree**n > degree_budget:
        raise DegreeBudgetError(phi.degree**n, degree_budget)
    cur = phi
    for _ in range(n - 1):
        cur = phi.compose(cur, degree_budget)
    return cur


def conjugate(phi: RationalMap, mu: RationalMap) -> RationalMap:
    """mu o phi o mu^{-1}."""
    if mu.degree != 1:
        raise ValueError("conjugating map must have degree one")
    return mu.compose(phi.compose(mu.inverse()))


RECIPROCAL = RationalMap((1,), (0, 1))


# ---------------------------------------------------------------------------
# ramification


def wronskian(phi: RationalMap) -> List[int]:
    """W = p'q - pq' as an integer coefficient list."""
    return ip_sub(ip_mul(ip_deriv(phi.num), phi.den), ip_mul(phi.num, ip_deriv(phi.den)))


def _order_at(poly: Sequence[int], a: int, b: int) -> int:
    """Multiplicity of the finite rational root a/b of an integer polynomial."""
    poly = ip_trim(poly)
    k = 0
    lin = [-a, b]
    while poly and ip_eval_hom(poly, a, b) == 0:
        poly = ip_divmod_exact(poly, lin)
        k += 1
    return k


@dataclass(frozen=True)
class RamificationDivisor:
    """Finite part from the Wronskian's Yun layers, plus the index at infinity."""

    degree: int
    finite: SquarefreeDecomposition
    e_infinity: int

    def finite_total(self) -> int:
        return sum(e * f.degree for e, f in self.finite.factors)

    def total(self) -> int:
        """Sum of e(z) - 1 over P^1; equals 2d - 2."""
        return self.finite_total() + self.e_infinity - 1

    def layers(self) -> List[Tuple[int, UniPoly]]:
        """(ramification index, squarefree polynomial of points with that index)."""
        return [(e + 1, f) for e, f in self.finite.factors]

    def critical_polynomial(self) -> UniPoly:
        out = UniPoly.const(1)
        for _, f in self.finite.factors:
            out = out * f
        return out


def ramification(phi: RationalMap) -> RamificationDivisor:
    if phi.degree < 1:
        raise ValueError("constant map")
    W = wronskian(phi)
    dec = yun_decompose(UniPoly(W))
    return RamificationDivisor(phi.degree, dec, _e_infinity(phi))


def _e_infinity(phi: RationalMap) -> int:
    psi = conjugate(phi, RECIPROCAL)
    return _finite_ram_index(psi, 0, 1)


def _finite_ram_index(phi: RationalMap, a: int, b: int) -> int:
    return 1 + _order_at(wronskian(phi), a, b)


def ram_index_at(phi: RationalMap, point) -> int:
    """e_phi(P) for a rational point P, including infinity."""
    P = ProjectivePoint.of(point)
    if P.is_infinity():
        return _e_infinity(phi)
    return _finite_ram_index(phi, P.a, P.b)


# ---------------------------------------------------------------------------
# point sets, pushforward and preimages


@dataclass(frozen=True)
class PointSet:
    """Galois-stable finite subset of P^1: roots of a squarefree monic poly, plus maybe infinity."""

    poly: UniPoly
    infinity: bool = False

    @classmethod
    def empty(cls) -> "PointSet":
        return cls(UniPoly.const(1), False)

    @classmethod
    def of_point(cls, point) -> "PointSet":
        P = ProjectivePoint.of(point)
        if P.is_infinity():
            return cls(UniPoly.const(1), True)
        return cls(UniPoly((-P.value(), 1)), False)

    @classmethod
    def of_points(cls, points) -> "PointSet":
        out = cls.empty()
        for pt in points:
            out = out.union(cls.of_point(pt))
        return out

    def size(self) -> int:
        return self.poly.degree + (1 if self.infinity else 0)

    def is_empty(self) -> bool:
        return self.size() == 0

    def union(self, other: "PointSet") -> "PointSet":
        g = poly_gcd(self.poly, other.poly)
        joined = (self.poly * other.poly).exact_div(g).monic()
        return PointSet(joined, self.infinity or other.infinity)

    def contains(self, point) -> bool:
        P = ProjectivePoint.of(point)
        if P.is_infinity():
            return self.infinity
        return self.poly(P.value()) == 0

    def __str__(self) -> str:
        parts = [] if self.poly.is_constant() else [f"roots({self.poly})"]
        if self.infinity:
            parts.append("inf")
        return " + ".join(parts) or "{}"


def pushforward(phi: RationalMap, S) -> PointSet:
    """phi(S) for a squarefree polynomial or PointSet S."""
    if isinstance(S, PointSet):
        out = pushforward(phi, S.poly) if not S.poly.is_constant() else PointSet.empty()
        if S.infinity:
            out = out.union(PointSet.of_point(phi(INFINITY)))
        return out
    S = S if isinstance(S, UniPoly) else UniPoly(S)
    if S.is_constant():
        return PointSet.empty()
    k = S.degree
    p, q = phi.p, phi.q
    lc_s = S.lc
    xs, ys = [], []
    for x0 in range(k + 1):
        h = q * x0 - p
        ys.append(resultant(S, h) / lc_s**h.degree)
        xs.append(Fraction(x0))
    N = _lagrange(xs, ys)
    poly = squarefree_part(N) if not N.is_constant() else UniPoly.const(1)
    return PointSet(poly, not poly_gcd(S, q).is_constant())


def _lagrange(xs: Sequence[Fraction], ys: Sequence[Fraction]) -> UniPoly:
    out = UniPoly()
    for i, xi in enumerate(xs):
        basis = UniPoly.const(1)
        denom = Fraction(1)
        for j, xj in enumerate(xs):
            if j != i:
                basis = basis * UniPoly((-xj, 1))
                denom *= xi - xj
        out = out + basis * (ys[i] / denom)
    return out


@dataclass(frozen=True)
class PreimageLayers:
    """phi^{-1}(S) split by ramification index: finite layers plus infinity's index (0 if absent)."""

    layers: Tuple[Tuple[int, UniPoly], ...]
    e_infinity: int

    def points(self) -> PointSet:
        out = UniPoly.const(1)
        for _, f in self.layers:
            out = out * f
        return PointSet(out.monic(), self.e_infinity > 0)


def preimage_layers(phi: RationalMap, S) -> PreimageLayers:
    """Preimages of a point or PointSet, with the ramification index of each layer.

    For a finite set with polynomial s of degree k the preimage is cut out by the
    homogenized s(p, q); its degree deficit below d*k is the multiplicity at infinity.
    """
    if isinstance(S, PointSet):
        target = S
    else:
        target = PointSet.of_point(S)
    d = phi.degree
    layers: List[Tuple[int, UniPoly]] = []
    e_inf = 0
    if not target.poly.is_constant():
        s = target.poly.primitive()[1]
        H = ip_hom_compose(s, phi.num, phi.den, len(s) - 1)
        e_inf += d * (len(s) - 1) - (len(H) - 1)
        layers.extend((e, UniPoly(f).monic()) for e, f in ip_yun(H))
    if target.infinity:
        e_inf += d - (len(phi.den) - 1)
        layers.extend((e, UniPoly(f).monic()) for e, f in ip_yun(phi.den))
    merged: dict = {}
    for e, f in layers:
        merged[e] = merged[e] * f if e in merged else f
    return PreimageLayers(tuple(sorted(merged.items(), key=lambda t: t[0])), e_inf)


# ---------------------------------------------------------------------------
# zero / pole profile


@dataclass(frozen=True)
class ZeroPoleProfile:
    """Signed multiplicity layers of the finite zeros (e > 0) and poles (e < 0).

    ``infinity_order`` is deg q - deg p: positive for a zero at infinity, negative
    for a pole.
    """

    layers: Tuple[Tuple[int, UniPoly], ...]
    infinity_order: int
    constant: Fraction

    def signed_counts(self) -> List[Tuple[int, int]]:
        return [(e, f.degree) for e, f in self.layers]


def zero_pole_profile(phi: RationalMap) -> ZeroPoleProfile:
    layers: List[Tuple[int, UniPoly]] = []
    pd = yun_decompose(phi.p)
    qd = yun_decompose(phi.q)
    layers.extend(pd.factors)
    layers.extend((-e, f) for e, f in qd.factors)
    layers.sort(key=lambda t: (t[0], t[1].sort_key()))
    return ZeroPoleProfile(tuple(layers), len(phi.den) - len(phi.num), pd.content / qd.content)
