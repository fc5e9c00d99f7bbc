from __future__ import annotations

from fractions import Fraction

import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from nlpencil.cyclo import (
    BadPrimeError,
    CycloElem,
    PrimeField,
    cyclotomic_poly,
    euler_phi,
    power_sum,
    prime_fields,
    reduce_mod_prime,
    root_power,
)

ORDERS = [8, 10, 12, 14, 16]


def elems(order: int):
    n = euler_phi(order)
    coeff = st.fractions(min_value=-5, max_value=5, max_denominator=6)
    return st.lists(coeff, min_size=n, max_size=n).map(lambda c: CycloElem.from_rationals(order, c))


@pytest.mark.parametrize("n", range(1, 25))
def test_cyclotomic_poly_matches_sympy(n):
    x = sympy.Symbol("x")
    expected = sympy.Poly(sympy.cyclotomic_poly(n, x), x).all_coeffs()[::-1]
    assert list(cyclotomic_poly(n)) == [int(c) for c in expected]


def test_small_identities():
    z8 = root_power(4, 1)
    z3 = root_power(4, 3)
    assert (z8 + z3) * (z8 - z3) == root_power(4, 2) * 2
    assert root_power(4, 9) == z8
    assert root_power(4, 4) == CycloElem.scalar(8, -1)
    assert z8 ** 8 == CycloElem.one(8)


@pytest.mark.parametrize("order", ORDERS)
def test_power_sum_brute_force(order):
    d = order // 2
    # zeta^k summed over a set of odd exponents, compared with repeated root_power additions
    B = (1, 3, 2 * d - 1)
    for e in range(2 * d):
        acc = CycloElem.zero(order)
        for u in B:
            acc = acc + root_power(d, u * e)
        assert power_sum(d, B, e) == acc


@given(data=st.data(), order=st.sampled_from(ORDERS))
def test_field_axioms(data, order):
    a = data.draw(elems(order))
    b = data.draw(elems(order))
    c = data.draw(elems(order))
    assert (a + b) * c == a * c + b * c
    assert (a * b) * c == a * (b * c)
    if a:
        assert a * a.inverse() == CycloElem.one(order)
        assert (b / a) * a == b


@given(data=st.data(), order=st.sampled_from(ORDERS))
def test_reduction_is_ring_homomorphism(data, order):
    F = prime_fields(order, 1)[0]
    a = data.draw(elems(order))
    b = data.draw(elems(order))
    p = F.p
    assert reduce_mod_prime(a + b, F) == (reduce_mod_prime(a, F) + reduce_mod_prime(b, F)) % p
    assert reduce_mod_prime(a * b, F) == reduce_mod_prime(a, F) * reduce_mod_prime(b, F) % p


@pytest.mark.parametrize("order", ORDERS)
def test_prime_fields_have_primitive_root(order):
    for F in prime_fields(order, 2):
        assert F.p > 2**30 and F.p % order == 1
        assert pow(F.w, order, F.p) == 1
        assert all(pow(F.w, order // q, F.p) != 1 for q in sympy.primefactors(order))


def test_invalid_prime_field_rejected():
    assert PrimeField(17, 2, 8).p == 17  # 2 has order exactly 8 mod 17
    with pytest.raises(ValueError):
        PrimeField(19, 2, 8)  # 19 is not 1 mod 8
    with pytest.raises(ValueError):
        PrimeField(17, 4, 8)  # 4 only has order 4


def test_bad_denominator():
    F = prime_fields(8, 1)[0]
    bad = CycloElem.from_rationals(8, [Fraction(1, F.p), 0, 0, 0])
    with pytest.raises(BadPrimeError):
        reduce_mod_prime(bad, F)


@given(data=st.data(), order=st.sampled_from(ORDERS))
def test_json_round_trip(data, order):
    a = data.draw(elems(order))
    assert CycloElem.from_json(a.to_json()) == a
