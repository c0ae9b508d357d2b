"""Exact integer and rational arithmetic: roots, factorization, classes in Q*/Q*^m.

Everything here works on Python ints and ``fractions.Fraction``. Factorization is
trial division followed by Pollard-Brent rho; when the configured work limit is
exhausted a :class:`UnfactoredError` is raised instead of guessing.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Optional, Tuple

__all__ = [
    "BudgetError",
    "FactorBudget",
    "UnfactoredError",
    "UnitClass",
    "as_fraction",
    "iroot",
    "is_probable_prime",
    "factorize",
    "mth_root_rational",
    "is_mth_power",
    "unit_class",
    "order_mod_power",
    "multiplicative_order",
    "divisors",
]


@dataclass(frozen=True)
class FactorBudget:
    """Work limits for integer factorization."""

    trial_limit: int = 10**6
    rho_iterations: int = 200_000
    rho_restarts: int = 6
    seed: int = 0x5EED


DEFAULT_BUDGET = FactorBudget()


class BudgetError(Exception):
    """Base class for every configured work limit being exceeded."""


class UnfactoredError(BudgetError, ArithmeticError):
    """Raised when an integer could not be split within the factorization budget."""

    def __init__(self, cofactor: int, message: str = ""):
        self.cofactor = cofactor
        super().__init__(message or f"could not factor {cofactor} within budget")


def as_fraction(q) -> Fraction:
    if isinstance(q, Fraction):
        return q
    return Fraction(q)


def iroot(n: int, k: int) -> int:
    """Floor of the k-th root of a non-negative integer."""
    if n < 0:
        raise ValueError("iroot of negative number")
    if k == 1 or n < 2:
        return n
    if k == 2:
        return math.isqrt(n)
    x = 1 << -(-n.bit_length() // k)
    while True:
        y = ((k - 1) * x + n // x ** (k - 1)) // k
        if y >= x:
            return x
        x = y


def _exact_root(n: int, k: int) -> Optional[int]:
    r = iroot(n, k)
    return r if r**k == n else None


@lru_cache(maxsize=4)
def _primes_upto(limit: int) -> Tuple[int, ...]:
    if limit < 2:
        return ()
    sieve = bytearray([1]) * (limit + 1)
    sieve[0:2] = b"\x00\x00"
    for p in range(2, math.isqrt(limit) + 1):
        if sieve[p]:
            sieve[p * p :: p] = bytearray(len(range(p * p, limit + 1, p)))
    return tuple(i for i, flag in enumerate(sieve) if flag)


_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)


def _miller_rabin(n: int, a: int) -> bool:
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    x = pow(a, d, n)
    if x in (1, n - 1):
        return True
    for _ in range(s - 1):
        x = x * x % n
        if x == n - 1:
            return True
    return False


def _jacobi(a: int, n: int) -> int:
    a %= n
    result = 1
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def _strong_lucas(n: int) -> bool:
    if math.isqrt(n) ** 2 == n:
        return False
    D = 5
    while True:
        j = _jacobi(D, n)
        if j == -1:
            break
        if j == 0 and abs(D) != n:
            return False
        D = -D - 2 if D > 0 else -D + 2
    P, Q = 1, (1 - D) // 4
    d, s = n + 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    U, V, Qk = 1, P, Q % n
    for bit in bin(d)[3:]:
        U = U * V % n
        V = (V * V - 2 * Qk) % n
        Qk = Qk * Qk % n
        if bit == "1":
            U, V = P * U + V, D * U + P * V
            if U & 1:
                U += n
            if V & 1:
                V += n
            U = (U >> 1) % n
            V = (V >> 1) % n
            Qk = Qk * Q % n
    if U == 0 or V == 0:
        return True
    for _ in range(s - 1):
        V = (V * V - 2 * Qk) % n
        Qk = Qk * Qk % n
        if V == 0:
            return True
    return False


def is_probable_prime(n: int) -> bool:
    """Miller-Rabin on fixed bases (deterministic below 3.3e24), BPSW above."""
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    if not all(_miller_rabin(n, a) for a in _MR_BASES):
        return False
    if n < 3_317_044_064_679_887_385_961_981:
        return True
    return _strong_lucas(n)


def _brent(n: int, budget: FactorBudget, rng: random.Random) -> Optional[int]:
    for _ in range(budget.rho_restarts):
        y, c, m = rng.randrange(1, n), rng.randrange(1, n), 128
        g = r = q = 1
        x = ys = y
        spent = 0
        while g == 1 and spent < budget.rho_iterations:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += m
            spent += r
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if 1 < g < n:
            return g
    return None


def _split(n: int, out: Dict[int, int], budget: FactorBudget, rng: random.Random, mult: int = 1) -> None:
    if n == 1:
        return
    if is_probable_prime(n):
        out[n] = out.get(n, 0) + mult
        return
    for k in range(n.bit_length(), 1, -1):
        r = _exact_root(n, k)
        if r is not None:
            _split(r, out, budget, rng, mult * k)
            return
    g = _brent(n, budget, rng)
    if g is None:
        raise UnfactoredError(n)
    _split(g, out, budget, rng, mult)
    _split(n // g, out, budget, rng, mult)


def factorize(n: int, budget: FactorBudget = DEFAULT_BUDGET) -> Dict[int, int]:
    """Prime factorization of |n| as {prime: exponent}; n must be nonzero."""
    n = abs(int(n))
    if n == 0:
        raise ValueError("cannot factor zero")
    out: Dict[int, int] = {}
    for p in _primes_upto(budget.trial_limit):
        if p * p > n:
            break
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out[p] = e
    if n > 1:
        if n <= budget.trial_limit**2:
            out[n] = out.get(n, 0) + 1
        else:
            rest: Dict[int, int] = {}
            _split(n, rest, budget, random.Random(budget.seed))
            for p, e in rest.items():
                out[p] = out.get(p, 0) + e
    return dict(sorted(out.items()))


def divisors(n: int, budget: FactorBudget = DEFAULT_BUDGET) -> list:
    """Positive divisors of a nonzero integer, sorted."""
    divs = [1]
    for p, e in factorize(n, budget).items():
        divs = [d * p**k for d in divs for k in range(e + 1)]
    return sorted(divs)


def mth_root_rational(q, m: int) -> Optional[Fraction]:
    """Return r with r**m == q, or None when q is not an m-th power in Q."""
    if m < 2:
        raise ValueError("m must be at least 2")
    q = as_fraction(q)
    if q == 0:
        return Fraction(0)
    if q < 0 and m % 2 == 0:
        return None
    a = _exact_root(abs(q.numerator), m)
    if a is None:
        return None
    b = _exact_root(q.denominator, m)
    if b is None:
        return None
    r = Fraction(a, b)
    return -r if q < 0 else r


def is_mth_power(q, m: int) -> bool:
    return mth_root_rational(q, m) is not None


@dataclass(frozen=True)
class UnitClass:
    """Canonical representative of a nonzero rational in Q*/Q*^m."""

    sign: int
    exponents: Tuple[Tuple[int, int], ...]
    m: int

    def value(self) -> Fraction:
        v = Fraction(self.sign)
        for p, e in self.exponents:
            v *= p**e
        return v

    def is_trivial(self) -> bool:
        return self.sign == 1 and not self.exponents

    def __mul__(self, other: "UnitClass") -> "UnitClass":
        if self.m != other.m:
            raise ValueError("modulus mismatch")
        exps: Dict[int, int] = dict(self.exponents)
        for p, e in other.exponents:
            exps[p] = (exps.get(p, 0) + e) % self.m
        sign = self.sign * other.sign if self.m % 2 == 0 else 1
        return UnitClass(sign, tuple(sorted((p, e) for p, e in exps.items() if e)), self.m)

    def to_json(self) -> dict:
        return {"sign": self.sign, "exponents": [list(t) for t in self.exponents], "m": self.m}


def unit_class(q, m: int, budget: FactorBudget = DEFAULT_BUDGET) -> UnitClass:
    """Class of q in Q*/Q*^m; equal outputs iff the quotient is an m-th power."""
    q = as_fraction(q)
    if q == 0:
        raise ValueError("zero has no unit class")
    exps: Dict[int, int] = {}
    for p, e in factorize(q.numerator, budget).items():
        exps[p] = exps.get(p, 0) + e
    if q.denominator > 1:
        for p, e in factorize(q.denominator, budget).items():
            exps[p] = exps.get(p, 0) - e
    reduced = tuple(sorted((p, e % m) for p, e in exps.items() if e % m))
    sign = (-1 if q < 0 else 1) if m % 2 == 0 else 1
    return UnitClass(sign, reduced, m)


def order_mod_power(c, m: int, budget: FactorBudget = DEFAULT_BUDGET) -> int:
    """Least t >= 1 with c**t an m-th power in Q."""
    uc = unit_class(c, m, budget)
    t = 1
    for _, e in uc.exponents:
        t = math.lcm(t, m // math.gcd(m, e))
    if uc.sign < 0:
        t = math.lcm(t, 2)
    return t


def multiplicative_order(j: int, n: int) -> int:
    """Order of j in (Z/nZ)*."""
    if n < 1:
        raise ValueError("modulus must be positive")
    if math.gcd(j, n) != 1:
        raise ValueError(f"{j} is not a unit modulo {n}")
    if n == 1:
        return 1
    x, k = j % n, 1
    while x != 1:
        x = x * j % n
        k += 1
    return k
