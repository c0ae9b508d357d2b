"""Dense univariate polynomials over Q.

Coefficients are stored lowest degree first. Heavy lifting (gcd, resultants,
composition) runs on primitive integer coefficient lists; :class:`UniPoly` is
the rational-coefficient facade used by the rest of the package.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, List, Optional, Sequence, Tuple

from .arith import FactorBudget, DEFAULT_BUDGET, divisors

IntPoly = List[int]

_KRONECKER_CUTOFF = 24


# ---------------------------------------------------------------------------
# integer coefficient lists


def ip_trim(a: Sequence[int]) -> IntPoly:
    a = list(a)
    while a and a[-1] == 0:
        a.pop()
    return a


def ip_add(a: Sequence[int], b: Sequence[int]) -> IntPoly:
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, c in enumerate(b):
        out[i] += c
    return ip_trim(out)


def ip_sub(a: Sequence[int], b: Sequence[int]) -> IntPoly:
    out = list(a) + [0] * max(0, len(b) - len(a))
    for i, c in enumerate(b):
        out[i] -= c
    return ip_trim(out)


def ip_scale(a: Sequence[int], c: int) -> IntPoly:
    if c == 0:
        return []
    return [c * x for x in a]


def _kron_pack(a: Sequence[int], nbytes: int) -> int:
    """sum a_i 2^(8 nbytes i) built from bytes; negative slots are fixed by one subtraction."""
    mod = 1 << (8 * nbytes)
    packed = int.from_bytes(b"".join((c % mod).to_bytes(nbytes, "little") for c in a), "little")
    borrow = bytearray(nbytes * (len(a) + 1))
    for i, c in enumerate(a):
        if c < 0:
            borrow[(i + 1) * nbytes] = 1
    return packed - int.from_bytes(bytes(borrow), "little")


def _kron_mul(a: Sequence[int], b: Sequence[int]) -> IntPoly:
    bound = max(map(abs, a)) * max(map(abs, b)) * min(len(a), len(b))
    nbytes = (bound.bit_length() + 2 + 7) // 8
    k = 8 * nbytes
    A, B = _kron_pack(a, nbytes), _kron_pack(b, nbytes)
    n = len(a) + len(b) - 1
    # unpack all slots at once from the two's complement bytes, propagating borrows
    raw = (A * B & ((1 << (k * n)) - 1)).to_bytes(nbytes * n, "little")
    half, full = 1 << (k - 1), 1 << k
    out = []
    carry = 0
    for i in range(n):
        d = int.from_bytes(raw[i * nbytes : (i + 1) * nbytes], "little") + carry
        if d >= half:
            d -= full
            carry = 1
        else:
            carry = 0
        out.append(d)
    return ip_trim(out)


def ip_mul(a: Sequence[int], b: Sequence[int]) -> IntPoly:
    if not a or not b:
        return []
    if min(len(a), len(b)) >= _KRONECKER_CUTOFF:
        return _kron_mul(a, b)
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return ip_trim(out)


def ip_pow(a: Sequence[int], n: int) -> IntPoly:
    result: IntPoly = [1]
    base = list(a)
    while n:
        if n & 1:
            result = ip_mul(result, base)
        n >>= 1
        if n:
            base = ip_mul(base, base)
    return result


def ip_content(a: Sequence[int]) -> int:
    g = 0
    for c in a:
        g = math.gcd(g, c)
        if g == 1:
            break
    return g


def ip_primitive(a: Sequence[int]) -> IntPoly:
    """Primitive part with positive leading coefficient."""
    a = ip_trim(a)
    if not a:
        return []
    g = ip_content(a)
    if a[-1] < 0:
        g = -g
    return [c // g for c in a]


def ip_deriv(a: Sequence[int]) -> IntPoly:
    return ip_trim([i * a[i] for i in range(1, len(a))])


def ip_eval_hom(a: Sequence[int], num: int, den: int) -> int:
    """Homogenized value sum a_i num^i den^(deg - i)."""
    total = 0
    npow = 1
    for c in a:
        total = total * den + c * npow
        npow *= num
    return total


def ip_divmod_exact(a: Sequence[int], b: Sequence[int]) -> IntPoly:
    """Exact quotient a / b over Z; raises if b does not divide a."""
    a = ip_trim(a)
    b = ip_trim(b)
    if not b:
        raise ZeroDivisionError("division by zero polynomial")
    if len(a) < len(b):
        if a:
            raise ArithmeticError("inexact polynomial division")
        return []
    r = list(a)
    lb = b[-1]
    q = [0] * (len(a) - len(b) + 1)
    for k in range(len(q) - 1, -1, -1):
        c, rem = divmod(r[k + len(b) - 1], lb)
        if rem:
            raise ArithmeticError("inexact polynomial division")
        q[k] = c
        if c:
            for i, y in enumerate(b):
                r[k + i] -= c * y
    if any(r[: len(b) - 1]):
        raise ArithmeticError("inexact polynomial division")
    return ip_trim(q)


def ip_prem(a: Sequence[int], b: Sequence[int]) -> IntPoly:
    """Pseudo-remainder lc(b)^(deg a - deg b + 1) * a mod b."""
    r = ip_trim(a)
    b = ip_trim(b)
    db = len(b) - 1
    if len(r) - 1 < db:
        return r
    lb = b[-1]
    steps = len(r) - len(b) + 1
    while r and len(r) - 1 >= db:
        c = r[-1]
        shift = len(r) - 1 - db
        r = [x * lb for x in r]
        for i, y in enumerate(b):
            r[shift + i] -= c * y
        r = ip_trim(r)
        steps -= 1
    if steps > 0 and r:
        f = lb**steps
        r = [x * f for x in r]
    return r


def ip_gcd(a: Sequence[int], b: Sequence[int]) -> IntPoly:
    """Primitive gcd (positive leading coefficient) via the primitive PRS."""
    a = ip_primitive(a)
    b = ip_primitive(b)
    if not a:
        return b
    if not b:
        return a
    if len(a) < len(b):
        a, b = b, a
    while b:
        r = ip_prem(a, b)
        a, b = b, ip_primitive(r)
    return ip_primitive(a)


def ip_resultant(a: Sequence[int], b: Sequence[int]) -> int:
    """Resultant of integer polynomials by the subresultant algorithm."""
    A = ip_trim(a)
    B = ip_trim(b)
    if not A or not B:
        return 0
    da, db = len(A) - 1, len(B) - 1
    if da == 0:
        return A[0] ** db
    if db == 0:
        return B[0] ** da
    ca, cb = ip_content(A), ip_content(B)
    A = [c // ca for c in A]
    B = [c // cb for c in B]
    t = ca**db * cb**da
    s = 1
    if da < db:
        A, B = B, A
        if da % 2 == 1 and db % 2 == 1:
            s = -1
    g = h = 1
    while True:
        dA, dB = len(A) - 1, len(B) - 1
        delta = dA - dB
        if dA % 2 == 1 and dB % 2 == 1:
            s = -s
        R = ip_prem(A, B)
        A = B
        if not R:
            return 0
        div = g * h**delta
        B = [c // div for c in R]
        g = A[-1]
        h = g**delta // h ** (delta - 1) if delta >= 1 else h
        if len(B) - 1 == 0:
            dA = len(A) - 1
            lb = B[0]
            h = lb**dA // h ** (dA - 1) if dA >= 1 else h
            return s * t * h


def ip_hom_compose(outer: Sequence[int], f: Sequence[int], g: Sequence[int], degree: int) -> IntPoly:
    """sum outer_i f^i g^(degree - i) for degree >= deg(outer)."""
    outer = ip_trim(outer)
    if not outer:
        return []
    if degree < len(outer) - 1:
        raise ValueError("homogenizing degree below polynomial degree")
    gpow: List[IntPoly] = [[1]]
    for _ in range(degree):
        gpow.append(ip_mul(gpow[-1], g))
    coeffs = list(outer) + [0] * (degree + 1 - len(outer))
    acc: IntPoly = [coeffs[degree]] if coeffs[degree] else []
    for i in range(degree - 1, -1, -1):
        acc = ip_mul(acc, f)
        if coeffs[i]:
            acc = ip_add(acc, ip_scale(gpow[degree - i], coeffs[i]))
    return acc


# ---------------------------------------------------------------------------
# rational facade


def _frac_tuple(coeffs: Iterable) -> Tuple[Fraction, ...]:
    out = [c if isinstance(c, Fraction) else Fraction(c) for c in coeffs]
    while out and out[-1] == 0:
        out.pop()
    return tuple(out)


class UniPoly:
    """Immutable polynomial over Q, coefficients lowest degree first."""

    __slots__ = ("coeffs", "_prim")

    def __init__(self, coeffs: Iterable = ()):
        object.__setattr__(self, "coeffs", _frac_tuple(coeffs))
        object.__setattr__(self, "_prim", None)

    def __setattr__(self, name, value):
        raise AttributeError("UniPoly is immutable")

    # construction ---------------------------------------------------------
    @classmethod
    def x(cls) -> "UniPoly":
        return cls((0, 1))

    @classmethod
    def const(cls, c) -> "UniPoly":
        return cls((c,))

    @classmethod
    def from_ints(cls, coeffs: Sequence[int]) -> "UniPoly":
        return cls(coeffs)

    @classmethod
    def from_roots(cls, roots: Iterable) -> "UniPoly":
        p = cls((1,))
        for r in roots:
            p = p * cls((-Fraction(r), 1))
        return p

    # basic queries --------------------------------------------------------
    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_constant(self) -> bool:
        return len(self.coeffs) <= 1

    @property
    def lc(self) -> Fraction:
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def __getitem__(self, i: int) -> Fraction:
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else Fraction(0)

    def primitive(self) -> Tuple[Fraction, Tuple[int, ...]]:
        """(content, ints) with ints primitive, positive leading coefficient."""
        if self._prim is None:
            if not self.coeffs:
                prim = (Fraction(0), ())
            else:
                den = 1
                for c in self.coeffs:
                    den = den * c.denominator // math.gcd(den, c.denominator)
                ints = [int(c * den) for c in self.coeffs]
                g = ip_content(ints)
                if ints[-1] < 0:
                    g = -g
                prim = (Fraction(g, den), tuple(c // g for c in ints))
            object.__setattr__(self, "_prim", prim)
        return self._prim

    def int_coeffs(self) -> Tuple[int, ...]:
        if any(c.denominator != 1 for c in self.coeffs):
            raise ValueError("polynomial has non-integer coefficients")
        return tuple(int(c) for c in self.coeffs)

    def monic(self) -> "UniPoly":
        if not self.coeffs:
            return self
        lc = self.coeffs[-1]
        return UniPoly(c / lc for c in self.coeffs)

    # arithmetic -----------------------------------------------------------
    def __add__(self, other) -> "UniPoly":
        other = _coerce(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return UniPoly(self[i] + other[i] for i in range(n))

    __radd__ = __add__

    def __neg__(self) -> "UniPoly":
        return UniPoly(-c for c in self.coeffs)

    def __sub__(self, other) -> "UniPoly":
        return self + (-_coerce(other))

    def __rsub__(self, other) -> "UniPoly":
        return _coerce(other) - self

    def __mul__(self, other) -> "UniPoly":
        other = _coerce(other)
        if not self.coeffs or not other.coeffs:
            return UniPoly()
        ca, ia = self.primitive()
        cb, ib = other.primitive()
        c = ca * cb
        return UniPoly(c * v for v in ip_mul(ia, ib))

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "UniPoly":
        if n < 0:
            raise ValueError("negative exponent")
        if not self.coeffs:
            return UniPoly() if n else UniPoly((1,))
        c, ints = self.primitive()
        return UniPoly(c**n * v for v in ip_pow(ints, n))

    def __divmod__(self, other) -> Tuple["UniPoly", "UniPoly"]:
        other = _coerce(other)
        if not other.coeffs:
            raise ZeroDivisionError("division by zero polynomial")
        r = list(self.coeffs)
        db = other.degree
        lb = other.lc
        if len(r) - 1 < db:
            return UniPoly(), self
        q = [Fraction(0)] * (len(r) - db)
        for k in range(len(q) - 1, -1, -1):
            c = r[k + db] / lb
            q[k] = c
            if c:
                for i, y in enumerate(other.coeffs):
                    r[k + i] -= c * y
        return UniPoly(q), UniPoly(r[:db])

    def __floordiv__(self, other) -> "UniPoly":
        return divmod(self, other)[0]

    def __mod__(self, other) -> "UniPoly":
        return divmod(self, other)[1]

    def exact_div(self, other) -> "UniPoly":
        q, r = divmod(self, other)
        if not r.is_zero():
            raise ArithmeticError("inexact polynomial division")
        return q

    def __call__(self, v):
        v = Fraction(v)
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * v + c
        return acc

    def derivative(self) -> "UniPoly":
        return UniPoly(i * self.coeffs[i] for i in range(1, len(self.coeffs)))

    def compose(self, inner: "UniPoly") -> "UniPoly":
        acc = UniPoly()
        for c in reversed(self.coeffs):
            acc = acc * inner + c
        return acc

    # comparison / display -------------------------------------------------
    def __eq__(self, other) -> bool:
        if isinstance(other, UniPoly):
            return self.coeffs == other.coeffs
        if isinstance(other, (int, Fraction)):
            return self.coeffs == _frac_tuple((other,))
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def sort_key(self):
        return (self.degree, tuple((c.numerator, c.denominator) for c in reversed(self.coeffs)))

    def __repr__(self) -> str:
        return f"UniPoly({self})"

    def __str__(self) -> str:
        return format_poly(self)


def _coerce(v) -> UniPoly:
    return v if isinstance(v, UniPoly) else UniPoly((v,))


def _fmt_rat(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def format_poly(p: UniPoly, var: str = "x") -> str:
    """Human and parser friendly rendering, e.g. ``3*x^2 - 1/2*x + 4``."""
    if p.is_zero():
        return "0"
    terms = []
    for i in range(p.degree, -1, -1):
        c = p.coeffs[i]
        if c == 0:
            continue
        sign = "-" if c < 0 else "+"
        a = abs(c)
        mono = "" if i == 0 else (var if i == 1 else f"{var}^{i}")
        if not mono:
            body = _fmt_rat(a)
        elif a == 1:
            body = mono
        else:
            body = f"{_fmt_rat(a)}*{mono}"
        terms.append((sign, body))
    first_sign, first = terms[0]
    out = ("-" if first_sign == "-" else "") + first
    for sign, body in terms[1:]:
        out += f" {sign} {body}"
    return out


# ---------------------------------------------------------------------------
# algorithms


@dataclass(frozen=True)
class SquarefreeDecomposition:
    """content * prod(factor ** e) with monic pairwise coprime squarefree factors."""

    content: Fraction
    factors: Tuple[Tuple[int, UniPoly], ...]

    def expand(self) -> UniPoly:
        out = UniPoly.const(self.content)
        for e, f in self.factors:
            out = out * f**e
        return out

    def multiplicity_profile(self) -> List[Tuple[int, int]]:
        """(multiplicity, number of distinct roots) pairs."""
        return [(e, f.degree) for e, f in self.factors]


def _to_poly(p) -> UniPoly:
    return p if isinstance(p, UniPoly) else UniPoly(p)


def poly_gcd(a: UniPoly, b: UniPoly) -> UniPoly:
    """Monic gcd."""
    a, b = _to_poly(a), _to_poly(b)
    if a.is_zero() and b.is_zero():
        raise ValueError("gcd(0, 0) is undefined")
    g = ip_gcd(a.primitive()[1], b.primitive()[1])
    return UniPoly(g).monic()


def ip_yun(f: Sequence[int]) -> List[Tuple[int, IntPoly]]:
    """Yun layers of a primitive integer polynomial: [(e, primitive factor)]."""
    f = ip_primitive(f)
    out: List[Tuple[int, IntPoly]] = []
    if len(f) <= 1:
        return out
    df = ip_deriv(f)
    a0 = ip_gcd(f, df)
    b = ip_divmod_exact(f, a0)
    c = ip_divmod_exact(df, a0)
    d = ip_sub(c, ip_deriv(b))
    i = 1
    while len(b) > 1:
        a = ip_gcd(b, d) if d else ip_primitive(b)
        if len(a) > 1:
            out.append((i, a))
        b = ip_divmod_exact(b, a)
        c = ip_divmod_exact(d, a) if d else []
        d = ip_sub(c, ip_deriv(b))
        i += 1
    return out


def yun_decompose(p: UniPoly) -> SquarefreeDecomposition:
    """Yun squarefree decomposition over Q."""
    p = _to_poly(p)
    if p.is_zero():
        raise ValueError("cannot decompose the zero polynomial")
    layers = ip_yun(p.primitive()[1])
    factors = tuple((e, UniPoly(a).monic()) for e, a in layers)
    return SquarefreeDecomposition(p.lc, factors)


def squarefree_part(p: UniPoly) -> UniPoly:
    p = _to_poly(p)
    if p.is_constant():
        return UniPoly.const(1)
    ints = p.primitive()[1]
    g = ip_gcd(ints, ip_deriv(ints))
    return UniPoly(ip_divmod_exact(ints, g)).monic()


def resultant(a: UniPoly, b: UniPoly) -> Fraction:
    """Res(a, b) = lc(a)^deg b * prod over roots x of a of b(x).

    With this convention Res(x - 2, x - 3) = -1. Either argument zero gives 0.
    """
    a, b = _to_poly(a), _to_poly(b)
    if a.is_zero() or b.is_zero():
        return Fraction(0)
    ca, ia = a.primitive()
    cb, ib = b.primitive()
    return ca ** b.degree * cb ** a.degree * ip_resultant(ia, ib)


def compose(outer: UniPoly, inner_num: UniPoly, inner_den: UniPoly) -> Tuple[UniPoly, UniPoly]:
    """(outer(f/g) * g^deg(outer), g^deg(outer)) before any normalization."""
    outer, f, g = _to_poly(outer), _to_poly(inner_num), _to_poly(inner_den)
    if g.is_zero():
        raise ZeroDivisionError("inner denominator is zero")
    if outer.is_zero():
        return UniPoly(), UniPoly.const(1)
    n = outer.degree
    co, io = outer.primitive()
    cf, iff = f.primitive() if not f.is_zero() else (Fraction(1), ())
    cg, ig = g.primitive()
    # rescale so that f and g share a denominator-free form
    num = ip_hom_compose_scaled(io, cf, list(iff), cg, list(ig), n)
    return UniPoly(co * c for c in num), g**n


def ip_hom_compose_scaled(outer, cf: Fraction, f, cg: Fraction, g, degree: int) -> List[Fraction]:
    """sum outer_i (cf f)^i (cg g)^(degree-i) as rational coefficients."""
    scaled = [Fraction(c) * cf**i * cg ** (degree - i) for i, c in enumerate(outer)]
    den = 1
    for c in scaled:
        den = den * c.denominator // math.gcd(den, c.denominator)
    ints = [int(c * den) for c in scaled]
    out = ip_hom_compose(ints, f or [0], g, degree)
    return [Fraction(c, den) for c in out]


def _rational_roots_of_primitive(ints: Sequence[int], budget: FactorBudget) -> List[Fraction]:
    ints = ip_trim(ints)
    roots: List[Fraction] = []
    if len(ints) <= 1:
        return roots
    k = 0
    while ints[k] == 0:
        k += 1
    if k:
        roots.append(Fraction(0))
        ints = ints[k:]
    if len(ints) <= 1:
        return roots
    lead, const = ints[-1], ints[0]
    bound = 1 + max(Fraction(abs(c), abs(lead)) for c in ints[:-1])
    for q in divisors(lead, budget):
        for p in divisors(const, budget):
            if Fraction(p, q) > bound:
                break
            if math.gcd(p, q) != 1:
                continue
            for cand in (p, -p):
                if ip_eval_hom(ints, cand, q) == 0:
                    roots.append(Fraction(cand, q))
    return roots


def rational_roots(p: UniPoly, budget: FactorBudget = DEFAULT_BUDGET) -> List[Tuple[Fraction, int]]:
    """All roots in Q with multiplicities, sorted by value."""
    dec = yun_decompose(p)
    out: List[Tuple[Fraction, int]] = []
    for e, f in dec.factors:
        for r in _rational_roots_of_primitive(f.primitive()[1], budget):
            out.append((r, e))
    return sorted(out)


def coprime_basis(polys: Iterable[UniPoly]) -> List[UniPoly]:
    """Pairwise coprime monic squarefree basis refining the given squarefree inputs."""
    basis: List[UniPoly] = []
    for p in polys:
        p = _to_poly(p)
        if p.is_constant():
            continue
        f = p.monic()
        refined: List[UniPoly] = []
        for b in basis:
            if f.is_constant():
                refined.append(b)
                continue
            g = poly_gcd(f, b)
            if g.is_constant():
                refined.append(b)
                continue
            refined.append(g)
            rest = b.exact_div(g)
            if not rest.is_constant():
                refined.append(rest.monic())
            f = f.exact_div(g).monic()
        if not f.is_constant():
            refined.append(f)
        basis = refined
    return sorted(basis, key=UniPoly.sort_key)
