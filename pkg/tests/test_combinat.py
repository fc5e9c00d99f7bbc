from __future__ import annotations

from fractions import Fraction
from itertools import product
from math import floor

import pytest
from hypothesis import given
from hypothesis import strategies as st

from nlpencil.combinat import (
    ExpVec,
    PencilSpec,
    check_index_set,
    count_pencil_specs,
    enumerate_pencil_specs,
    frac_int_parts,
    h20,
    in_check_index_set,
    index_set,
    pochhammer,
)


def brute_index_set(d, N):
    return sorted(v for v in product(range(N + 1), repeat=4) if sum(v) == N and max(v) <= d - 2)


@pytest.mark.parametrize("d,N", [(4, 0), (4, 4), (5, 1), (5, 5), (6, 2), (6, 6), (8, 8)])
def test_index_set_brute_force(d, N):
    got = index_set(d, N)
    assert list(got) == brute_index_set(d, N)
    assert all(isinstance(v, ExpVec) for v in got)


def test_index_set_sizes():
    # I_{d-4} has h20 elements; I_4 at d=4 is 19 monomials (entries at most 2)
    for d in range(4, 12):
        assert len(index_set(d, d - 4)) == h20(d)
    assert len(index_set(4, 4)) == 19


@pytest.mark.parametrize("d", range(4, 9))
def test_check_index_set(d):
    brute = [v for v in brute_index_set(d, 2 * d - 4) if v[0] + v[1] == d - 2]
    assert sorted(check_index_set(d)) == brute
    assert all(in_check_index_set(d, v) for v in brute)
    assert not in_check_index_set(d, (d - 1, 0, d - 3, 0))


@pytest.mark.parametrize("d", range(4, 12))
def test_enumeration_matches_closed_form(d):
    specs = enumerate_pencil_specs(d)
    assert len(specs) == count_pencil_specs(d) == len(set(specs))


def brute_specs(d):
    h = d // 2
    out = set()
    for d1, d2, s1, s2, m1, m2 in product(range(0, h + 2), repeat=6):
        if 1 <= d1 <= d2 <= h and 1 <= s1 <= h and 1 <= s2 <= h and 0 <= m1 <= min(d1, s1) and 0 <= m2 <= min(d2, s2):
            out.add((d1, d2, s1, s2, m1, m2))
    return out


@pytest.mark.parametrize("d", [4, 5, 6, 7])
def test_enumeration_brute_force(d):
    assert {s.params for s in enumerate_pencil_specs(d)} == brute_specs(d)


def test_spec_validation_and_parse():
    assert PencilSpec.parse(8, "(3,3,1,1,0,0)") == PencilSpec(8, 3, 3, 1, 1, 0, 0)
    with pytest.raises(ValueError):
        PencilSpec(8, 3, 2, 1, 1, 0, 0)  # d1 > d2
    with pytest.raises(ValueError):
        PencilSpec(4, 1, 1, 1, 1, 2, 0)  # m1 > min(d1, s1)
    with pytest.raises(ValueError):
        PencilSpec.parse(4, "1,1,1")


@given(st.fractions(min_value=-20, max_value=20, max_denominator=30))
def test_frac_int_parts(r):
    n, f = frac_int_parts(r)
    assert n == floor(r) and 0 <= f < 1 and n + f == r


@given(st.fractions(min_value=-5, max_value=5, max_denominator=9), st.integers(0, 6))
def test_pochhammer_recurrence(x, y):
    assert pochhammer(x, y + 1) == pochhammer(x, y) * (x + y)
    assert pochhammer(x, 0) == 1


def test_pochhammer_values():
    assert pochhammer(Fraction(1, 2), 3) == Fraction(1, 2) * Fraction(3, 2) * Fraction(5, 2)
    assert pochhammer(1, 5) == 120
    with pytest.raises(ValueError):
        pochhammer(1, -1)
