"""Classes of rational functions modulo m-th powers in Q(x)*.

A class is stored as a rational constant times a product of monic squarefree
pairwise-coprime polynomials F_r raised to exponents r in [1, m-1], one F_r per
exponent. Composition with a map works directly on these small representatives,
so iterating a map with bounded class never expands the iterate itself.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .arith import DEFAULT_BUDGET, FactorBudget, UnfactoredError, UnitClass, factorize, mth_root_rational, unit_class
from .qpoly import UniPoly, coprime_basis, ip_hom_compose, ip_yun, poly_gcd, yun_decompose
from .ratmap import DEFAULT_DEGREE_BUDGET, DegreeBudgetError, RationalMap, iterate_map

Factors = Tuple[Tuple[int, UniPoly], ...]


def _group(pieces: Sequence[Tuple[int, UniPoly]], m: int) -> Factors:
    """Group pairwise coprime (exponent, poly) pieces by exponent mod m."""
    acc: Dict[int, UniPoly] = {}
    for e, f in pieces:
        r = e % m
        if r == 0 or f.is_constant():
            continue
        acc[r] = acc[r] * f if r in acc else f
    return tuple((r, acc[r].monic()) for r in sorted(acc))


@dataclass(frozen=True)
class PowerClass:
    """const * prod F_r^r modulo m-th powers; ``unit`` is None when the constant is unfactored."""

    m: int
    const: Fraction
    factors: Factors
    unit: Optional[UnitClass]

    @classmethod
    def make(cls, m: int, const, factors: Factors, budget: FactorBudget = DEFAULT_BUDGET) -> "PowerClass":
        const = Fraction(const)
        try:
            unit = unit_class(const, m, budget)
            const = unit.value()
        except UnfactoredError:
            unit = None
        return cls(m, const, factors, unit)

    @classmethod
    def of_x(cls, m: int) -> "PowerClass":
        return cls.make(m, 1, ((1, UniPoly.x()),))

    def is_empty(self) -> bool:
        """True when the represented function is an m-th power in Q(x)*."""
        return not self.factors and mth_root_rational(self.const, self.m) is not None

    def is_constant(self) -> bool:
        return not self.factors

    def __eq__(self, other) -> bool:
        if not isinstance(other, PowerClass):
            return NotImplemented
        return (
            self.m == other.m
            and self.factors == other.factors
            and mth_root_rational(self.const / other.const, self.m) is not None
        )

    def __hash__(self) -> int:
        return hash((self.m, self.factors))

    def total_degree(self) -> int:
        """rho-style count: distinct finite points with nonzero exponent."""
        return sum(f.degree for _, f in self.factors)

    def infinity_order(self) -> int:
        """Order of the representative at infinity (zero order; negative for a pole)."""
        return -sum(r * f.degree for r, f in self.factors)

    def infinity_in_support(self) -> bool:
        return self.infinity_order() % self.m != 0

    def representative(self) -> Tuple[UniPoly, UniPoly]:
        """(numerator, denominator) of const * prod F_r^r."""
        num = UniPoly.const(self.const)
        for r, f in self.factors:
            num = num * f**r
        return num, UniPoly.const(1)

    def evaluate(self, v) -> Optional[Fraction]:
        """Representative at a finite rational point; None at a root of some F_r."""
        v = Fraction(v)
        out = self.const
        for r, f in self.factors:
            fv = f(v)
            if fv == 0:
                return None
            out *= fv**r
        return out

    def __mul__(self, other: "PowerClass") -> "PowerClass":
        return class_mul(self, other)

    def __str__(self) -> str:
        parts = [str(self.const) if self.const.denominator == 1 else f"({self.const})"]
        for r, f in self.factors:
            base = f"({f})" if f.degree and len(f.coeffs) > 1 and any(f.coeffs[:-1]) else str(f)
            parts.append(base if r == 1 else f"{base}^{r}")
        return " * ".join(parts) + f"  mod {self.m}-th powers"

    def to_json(self) -> dict:
        return {
            "m": self.m,
            "const": str(self.const),
            "unit": self.unit.to_json() if self.unit else None,
            "factors": [{"exponent": r, "poly": str(f)} for r, f in self.factors],
        }


# ---------------------------------------------------------------------------
# reduction


def _signed_layers(num: UniPoly, den: UniPoly) -> Tuple[Fraction, List[Tuple[int, UniPoly]]]:
    dn = yun_decompose(num)
    dd = yun_decompose(den)
    layers = list(dn.factors) + [(-e, f) for e, f in dd.factors]
    return dn.content / dd.content, layers


def _merge_coprime(layers: List[Tuple[int, UniPoly]]) -> List[Tuple[int, UniPoly]]:
    """Make signed layers pairwise coprime when numerator and denominator share roots."""
    basis = coprime_basis([f for _, f in layers])
    out = []
    for b in basis:
        e = sum(k for k, f in layers if not poly_gcd(f, b).is_constant())
        if e:
            out.append((e, b))
    return out


def reduce_class(
    num, den=None, m: int = 2, budget: FactorBudget = DEFAULT_BUDGET
) -> Tuple[PowerClass, Tuple[UniPoly, UniPoly]]:
    """Class of num/den and psi with num/den = const * prod F_r^r * psi^m exactly."""
    if isinstance(num, RationalMap):
        num, den = num.p, num.q
    num = num if isinstance(num, UniPoly) else UniPoly(num)
    den = UniPoly.const(1) if den is None else (den if isinstance(den, UniPoly) else UniPoly(den))
    if num.is_zero():
        raise ValueError("zero has no class")
    c, layers = _signed_layers(num, den)
    if not poly_gcd(num, den).is_constant():
        layers = _merge_coprime(layers)
    psi_n, psi_d = UniPoly.const(1), UniPoly.const(1)
    for e, f in layers:
        k = e // m
        if k > 0:
            psi_n = psi_n * f**k
        elif k < 0:
            psi_d = psi_d * f ** (-k)
    cls = PowerClass.make(m, c, _group(layers, m), budget)
    root = mth_root_rational(c / cls.const, m)
    return cls, (psi_n * root, psi_d)


def power_part(h, m: int) -> Tuple[UniPoly, UniPoly]:
    """h = f * g^m with g monic of maximal degree."""
    h = h if isinstance(h, UniPoly) else UniPoly(h)
    dec = yun_decompose(h)
    f = UniPoly.const(dec.content)
    g = UniPoly.const(1)
    for e, fac in dec.factors:
        f = f * fac ** (e % m)
        g = g * fac ** (e // m)
    return f, g


def poly_mth_root(p: UniPoly, m: int) -> Optional[UniPoly]:
    """g with g^m = p exactly, or None.

    The monic root is the power series (p_rev / lc)^(1/m) truncated at deg p / m,
    where p_rev is p with reversed coefficients; it is unique, so checking g^m = p
    decides the question without any squarefree decomposition.
    """
    if p.is_zero():
        return UniPoly()
    n = p.degree
    if n % m:
        return None
    c = mth_root_rational(p.lc, m)
    if c is None:
        return None
    k = n // m
    F = [a / p.lc for a in reversed(p.coeffs[max(0, n - k) :])]
    alpha1 = Fraction(1, m) + 1
    G = [Fraction(1)]
    for i in range(1, k + 1):
        G.append(sum(((alpha1 * j - i) * F[j] * G[i - j] for j in range(1, i + 1)), Fraction(0)) / i)
    g = UniPoly(reversed(G))
    if g**m * p.lc != p:
        return None
    return g * c


def mth_root_function(num, den=None, m: int = 2) -> Optional[Tuple[UniPoly, UniPoly]]:
    """tau = (a, b) with (a/b)^m = num/den, or None."""
    if isinstance(num, RationalMap):
        num, den = num.p, num.q
    else:
        num = num if isinstance(num, UniPoly) else UniPoly(num)
        den = UniPoly.const(1) if den is None else (den if isinstance(den, UniPoly) else UniPoly(den))
        g = poly_gcd(num, den)
        if not g.is_constant():
            num, den = num.exact_div(g), den.exact_div(g)
    # make den monic so the constant lives in num only
    lc = den.lc
    num, den = num * (1 / lc), den * (1 / lc)
    b = poly_mth_root(den, m)
    if b is None:
        return None
    a = poly_mth_root(num, m)
    if a is None:
        return None
    return a, b


# ---------------------------------------------------------------------------
# group law and composition


def class_mul(a: PowerClass, b: PowerClass, budget: FactorBudget = DEFAULT_BUDGET) -> PowerClass:
    if a.m != b.m:
        raise ValueError("modulus mismatch")
    m = a.m
    basis = coprime_basis([f for _, f in a.factors] + [f for _, f in b.factors])
    pieces = []
    for beta in basis:
        e = 0
        for r, f in a.factors + b.factors:
            if not poly_gcd(f, beta).is_constant():
                e += r
        pieces.append((e, beta))
    return PowerClass.make(m, a.const * b.const, _group(pieces, m), budget)


def class_compose(
    a: PowerClass,
    phi: RationalMap,
    budget: FactorBudget = DEFAULT_BUDGET,
    degree_budget: int = DEFAULT_DEGREE_BUDGET,
) -> PowerClass:
    """Class of (any representative of a) o phi."""
    m = a.m
    if not a.factors:
        return PowerClass.make(m, a.const, (), budget)
    if sum(f.degree for _, f in a.factors) * phi.degree > degree_budget:
        raise DegreeBudgetError(sum(f.degree for _, f in a.factors) * phi.degree, degree_budget)
    const = a.const
    pieces: List[Tuple[int, UniPoly]] = []
    q_weight = 0
    lc_q = Fraction(phi.den[-1])
    for r, F in a.factors:
        cF, ints = F.primitive()
        H = ip_hom_compose(ints, phi.num, phi.den, len(ints) - 1)
        k = len(ints) - 1
        const *= (cF * H[-1] / lc_q**k) ** r
        pieces.extend((r * e, UniPoly(f).monic()) for e, f in ip_yun(H))
        q_weight += r * k
    pieces.extend((-q_weight * e, UniPoly(f).monic()) for e, f in ip_yun(phi.den))
    return PowerClass.make(m, const, _group(pieces, m), budget)


def iterate_classes(
    phi: RationalMap, m: int, N: int, budget: FactorBudget = DEFAULT_BUDGET, degree_budget: int = DEFAULT_DEGREE_BUDGET
) -> List[PowerClass]:
    """[class(phi^1), ..., class(phi^N)] by repeated composition and reduction."""
    out: List[PowerClass] = []
    cur = PowerClass.of_x(m)
    for _ in range(N):
        cur = class_compose(cur, phi, budget, degree_budget)
        out.append(cur)
    return out


# ---------------------------------------------------------------------------
# relations


@dataclass(frozen=True)
class IterateRelation:
    """phi^r = phi^s * psi^m with psi = psi_num / psi_den verified exactly."""

    r: int
    s: int
    m: int
    psi_num: UniPoly
    psi_den: UniPoly

    def to_json(self) -> dict:
        return {"r": self.r, "s": self.s, "m": self.m, "psi": f"({self.psi_num})/({self.psi_den})"}


def default_tail_bound(m: int) -> int:
    return max([2] + list(factorize(m).values()))


def default_gap_bound(m: int) -> int:
    return 4 if m == 2 else m


def verify_relation(phi: RationalMap, rel: IterateRelation, degree_budget: int = DEFAULT_DEGREE_BUDGET) -> bool:
    """Check phi^r * den(phi^s) * psi_den^m == num(phi^s) * den(phi^r) * psi_num^m."""
    fr = iterate_map(phi, rel.r, degree_budget)
    fs = iterate_map(phi, rel.s, degree_budget)
    lhs = fr.p * fs.q * rel.psi_den**rel.m
    rhs = fs.p * fr.q * rel.psi_num**rel.m
    return lhs == rhs


def find_relation(
    phi: RationalMap,
    m: int,
    max_s: Optional[int] = None,
    max_gap: Optional[int] = None,
    budget: FactorBudget = DEFAULT_BUDGET,
    degree_budget: int = DEFAULT_DEGREE_BUDGET,
) -> Optional[IterateRelation]:
    """Least (r - s, s) with class(phi^r) = class(phi^s), plus a verified witness psi.

    The default tail bound is max(2, largest prime exponent of m), enough for
    trivial maps c x^j psi^m where x^j needs that many steps to become an m-th power.
    """
    if phi.degree < 2:
        raise ValueError("degree must be at least 2")
    if max_s is None:
        max_s = default_tail_bound(m)
    gap_bound = default_gap_bound(m) if max_gap is None else max_gap
    classes = [PowerClass.of_x(m)] + iterate_classes(phi, m, max_s + gap_bound, budget, degree_budget)
    for gap in range(1, gap_bound + 1):
        for s in range(0, max_s + 1):
            r = s + gap
            if classes[r] != classes[s]:
                continue
            fr = iterate_map(phi, r, degree_budget)
            fs = iterate_map(phi, s, degree_budget)
            root = mth_root_function(fr.p * fs.q, fr.q * fs.p, m)
            if root is None:
                raise AssertionError("class equality without an m-th root witness")
            rel = IterateRelation(r, s, m, root[0], root[1])
            if not verify_relation(phi, rel, degree_budget):
                raise AssertionError("relation witness failed verification")
            return rel
    return None


def iterate_power_bound(m: int) -> int:
    """Largest n worth testing for phi^n in Q(x)^m: 1 + floor(log2 m), and 2 when m = 2."""
    return 2 if m == 2 else 1 + int(math.floor(math.log2(m)))


def is_iterate_mth_power(
    phi: RationalMap,
    m: int,
    budget: FactorBudget = DEFAULT_BUDGET,
    degree_budget: int = DEFAULT_DEGREE_BUDGET,
) -> Optional[Tuple[int, Tuple[UniPoly, UniPoly]]]:
    """Least n within the bound with phi^n an m-th power, with its m-th root."""
    if phi.degree < 2:
        raise ValueError("degree must be at least 2")
    bound = iterate_power_bound(m)
    for n, cls in enumerate(iterate_classes(phi, m, bound, budget, degree_budget), start=1):
        if cls.is_empty():
            root = mth_root_function(iterate_map(phi, n, degree_budget), m=m)
            if root is None:
                raise AssertionError("empty class without an m-th root witness")
            return n, root
    return None
