from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import rationals
from powerorbits.arith import (
    FactorBudget,
    UnfactoredError,
    divisors,
    factorize,
    iroot,
    is_mth_power,
    is_probable_prime,
    multiplicative_order,
    mth_root_rational,
    order_mod_power,
    unit_class,
)

moduli = st.integers(min_value=2, max_value=8)


# ---------------------------------------------------------------------------
# fixed examples


@pytest.mark.parametrize(
    "q, m, expected",
    [
        (Fraction(16, 81), 4, Fraction(2, 3)),
        (Fraction(-8, 27), 3, Fraction(-2, 3)),
        (Fraction(81, 2), 2, None),
        (Fraction(-4), 2, None),
        (Fraction(0), 5, Fraction(0)),
        (Fraction(1), 7, Fraction(1)),
    ],
)
def test_mth_root_examples(q, m, expected):
    assert mth_root_rational(q, m) == expected


def test_unit_class_of_twelve_mod_squares():
    uc = unit_class(12, 2)
    assert uc.sign == 1 and uc.exponents == ((3, 1),)
    assert uc.value() == 3


def test_unit_class_of_minus_quarter_mod_fourth_powers():
    uc = unit_class(Fraction(-1, 4), 4)
    assert uc.sign == -1 and uc.exponents == ((2, 2),)


def test_unit_class_odd_modulus_drops_sign():
    assert unit_class(-8, 3).is_trivial()
    assert unit_class(-2, 3) == unit_class(2, 3)


@pytest.mark.parametrize("c, m, t", [(2, 2, 2), (4, 2, 1), (8, 2, 2), (-1, 2, 2), (-1, 3, 1), (Fraction(4, 9), 4, 2), (12, 6, 6)])
def test_order_mod_power_examples(c, m, t):
    assert order_mod_power(c, m) == t


@pytest.mark.parametrize("j, n, order", [(2, 3, 2), (2, 5, 4), (3, 7, 6), (1, 9, 1), (5, 1, 1)])
def test_multiplicative_order_examples(j, n, order):
    assert multiplicative_order(j, n) == order


def test_multiplicative_order_rejects_non_units():
    with pytest.raises(ValueError):
        multiplicative_order(2, 4)


def test_unit_class_of_zero_rejected():
    with pytest.raises(ValueError):
        unit_class(0, 2)


def test_factorization_budget_raises_typed_error():
    n = 1000000007 * 998244353
    tiny = FactorBudget(trial_limit=100, rho_iterations=1, rho_restarts=1)
    with pytest.raises(UnfactoredError):
        factorize(n, tiny)
    assert factorize(n) == {998244353: 1, 1000000007: 1}


def test_divisors_match_sympy():
    for n in (1, 12, 360, 1001, 2**10 * 3**3):
        assert divisors(n) == sorted(sympy.divisors(n))


def test_large_prime_and_semiprime():
    p = 2**89 - 1
    assert is_probable_prime(p)
    assert not is_probable_prime(p * (2**61 - 1))
    assert not is_probable_prime(3215031751)
    assert factorize(p * 1000003) == {1000003: 1, p: 1}


# ---------------------------------------------------------------------------
# oracle properties


@settings(max_examples=500)
@given(st.integers(min_value=1, max_value=10**15))
def test_factorize_matches_sympy(n):
    assert factorize(n) == sympy.factorint(n)


@settings(max_examples=500)
@given(st.integers(min_value=2, max_value=10**12))
def test_primality_matches_sympy(n):
    assert is_probable_prime(n) == sympy.isprime(n)


@settings(max_examples=500)
@given(st.integers(min_value=0, max_value=10**30), st.integers(min_value=1, max_value=7))
def test_iroot_is_floor_root(n, k):
    r = iroot(n, k)
    assert r**k <= n < (r + 1) ** k


@settings(max_examples=500)
@given(rationals(nonzero=True), moduli)
def test_root_of_power_recovers_base(q, m):
    root = mth_root_rational(q**m, m)
    assert root is not None
    assert root == q or (m % 2 == 0 and root == -q)
    assert unit_class(q**m, m).is_trivial()


@settings(max_examples=500)
@given(rationals(nonzero=True), rationals(nonzero=True), moduli)
def test_unit_class_group_law(a, b, m):
    assert unit_class(a * b, m) == unit_class(a, m) * unit_class(b, m)
    same = unit_class(a, m) == unit_class(b, m)
    assert same == is_mth_power(a / b, m)


@settings(max_examples=500)
@given(rationals(nonzero=True), moduli)
def test_unit_class_value_differs_by_mth_power(q, m):
    assert is_mth_power(q / unit_class(q, m).value(), m)


@settings(max_examples=500)
@given(rationals(nonzero=True), moduli)
def test_order_mod_power_is_least(c, m):
    t = order_mod_power(c, m)
    assert (2 * m) % t == 0
    assert mth_root_rational(c**t, m) is not None
    assert all(mth_root_rational(c**s, m) is None for s in range(1, t))
