"""Shared hypothesis strategies and sympy-based oracles."""

from __future__ import annotations

import sys
from fractions import Fraction

import sympy
from hypothesis import HealthCheck, assume, settings
from hypothesis import strategies as st

from powerorbits.qpoly import UniPoly
from powerorbits.ratmap import RationalMap, make_map

settings.register_profile(
    "default",
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.filter_too_much],
    derandomize=True,
)
settings.load_profile("default")

SX = sympy.Symbol("x")


# ---------------------------------------------------------------------------
# conversions


def to_sympy(p: UniPoly) -> sympy.Poly:
    coeffs = [sympy.Rational(c.numerator, c.denominator) for c in reversed(p.coeffs)] or [0]
    return sympy.Poly(coeffs, SX, domain="QQ")


def from_sympy(p) -> UniPoly:
    p = sympy.Poly(p, SX, domain="QQ")
    return UniPoly([Fraction(int(c.p), int(c.q)) for c in reversed(p.all_coeffs())])


def map_to_sympy(phi: RationalMap):
    return to_sympy(phi.p).as_expr() / to_sympy(phi.q).as_expr()


def sylvester_resultant(a: UniPoly, b: UniPoly) -> Fraction:
    """Determinant of the Sylvester matrix, rows of a first."""
    m, n = a.degree, b.degree
    ca = list(reversed(a.coeffs))
    cb = list(reversed(b.coeffs))
    size = m + n
    if size == 0:
        return Fraction(1)
    rows = []
    for i in range(n):
        rows.append([0] * i + ca + [0] * (size - m - 1 - i))
    for i in range(m):
        rows.append([0] * i + cb + [0] * (size - n - 1 - i))
    det = sympy.Matrix([[sympy.Rational(c.numerator, c.denominator) if isinstance(c, Fraction) else c for c in r] for r in rows]).det()
    det = sympy.Rational(det)
    return Fraction(int(det.p), int(det.q))


def sympy_iterate(phi: RationalMap, n: int):
    """phi^n as a sympy expression, by homogeneous substitution of Poly objects."""
    P, Q = to_sympy(phi.p), to_sympy(phi.q)
    d = phi.degree
    num, den = sympy.Poly(SX, SX, domain="QQ"), sympy.Poly(1, SX, domain="QQ")
    for _ in range(n):
        pc = P.all_coeffs()[::-1] + [0] * (d + 1 - len(P.all_coeffs()))
        qc = Q.all_coeffs()[::-1] + [0] * (d + 1 - len(Q.all_coeffs()))
        new_num = sum((c * num**i * den ** (d - i) for i, c in enumerate(pc)), sympy.Poly(0, SX, domain="QQ"))
        new_den = sum((c * num**i * den ** (d - i) for i, c in enumerate(qc)), sympy.Poly(0, SX, domain="QQ"))
        g = sympy.gcd(new_num, new_den)
        num, den = new_num.exquo(g), new_den.exquo(g)
    return num.as_expr() / den.as_expr()


def expansion_profile(expr, m: int):
    """(signed exponent, degree) pairs of num/den via sympy's squarefree decomposition."""
    num, den = sympy.fraction(sympy.cancel(expr))
    acc = {}
    for sign, part in ((1, num), (-1, den)):
        _, facs = sympy.sqf_list(sympy.Poly(part, SX))
        for f, e in facs:
            acc[sign * e] = acc.get(sign * e, 0) + f.degree()
    return [(e, c) for e, c in acc.items() if c]


# ---------------------------------------------------------------------------
# strategies

small_ints = st.integers(min_value=-6, max_value=6)
nonzero_ints = st.integers(min_value=-6, max_value=6).filter(bool)


@st.composite
def rationals(draw, max_num=40, max_den=12, nonzero=False):
    num = draw(st.integers(min_value=-max_num, max_value=max_num))
    if nonzero and num == 0:
        num = 1
    den = draw(st.integers(min_value=1, max_value=max_den))
    return Fraction(num, den)


@st.composite
def polys(draw, min_degree=0, max_degree=4, coeff=st.integers(min_value=-6, max_value=6)):
    d = draw(st.integers(min_value=min_degree, max_value=max_degree))
    coeffs = draw(st.lists(coeff, min_size=d + 1, max_size=d + 1))
    if coeffs[-1] == 0:
        coeffs[-1] = draw(nonzero_ints)
    return UniPoly(coeffs)


@st.composite
def squarefree_polys(draw, min_degree=1, max_degree=3):
    p = draw(polys(min_degree, max_degree))
    return p.exact_div(from_sympy(sympy.gcd(to_sympy(p), to_sympy(p).diff(SX))))


@st.composite
def maps(draw, min_degree=2, max_degree=6):
    d = draw(st.integers(min_value=min_degree, max_value=max_degree))
    top = draw(st.sampled_from(["num", "den", "both"]))
    dn = d if top in ("num", "both") else draw(st.integers(min_value=0, max_value=d))
    dd = d if top in ("den", "both") else draw(st.integers(min_value=0, max_value=d))
    p = draw(polys(dn, dn))
    q = draw(polys(dd, dd))
    phi = make_map(p, q)
    assume(phi.degree >= min_degree)
    return phi


quadratic_maps = maps(min_degree=2, max_degree=2)


def pytest_terminal_summary(terminalreporter):
    """Repeat the acceptance PASS/FAIL lines at the end of the run."""
    mod = sys.modules.get("test_acceptance")
    if mod is not None and mod.REPORT:
        terminalreporter.section("acceptance criteria")
        for line in mod.REPORT:
            terminalreporter.write_line(line)
