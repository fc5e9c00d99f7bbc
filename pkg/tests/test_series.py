from __future__ import annotations

from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, strategies as st

from nlpencil.combinat import ExpVec, index_set
from nlpencil.cycles import CICycle, CycleCombo, period_matrix, period_p
from nlpencil.cyclo import CycloElem, prime_fields, reduce_mod_prime
from nlpencil.series import (
    ExactDomain,
    FormSpec,
    ModularDomain,
    TruncatedSeries,
    VariableMismatchError,
    combo_taylor,
    contributing_indices,
    taylor_period,
    taylor_system,
)

Q = ExactDomain(2)
F = prime_fields(10, 1)[0]
FP = ModularDomain(F)
VARS = ("x", "y", "z")


def _series(terms, order=3, dom=FP):
    return TruncatedSeries(VARS, order, terms, dom)


small_series = st.dictionaries(
    st.tuples(*[st.integers(0, 2)] * 3).filter(lambda k: sum(k) <= 3),
    st.integers(0, 50),
    max_size=6,
).map(_series)


def test_unit_and_inverse_pair():
    one = TruncatedSeries.constant(1, VARS, 3, FP)
    t = TruncatedSeries.variable(0, VARS, 1, Q)
    f = _series({(0, 0, 0): 3, (1, 2, 0): 5})
    assert f * one == f
    assert (1 + t) * (1 - t) == TruncatedSeries.constant(1, VARS, 1, Q)


@given(small_series, small_series, small_series)
def test_ring_axioms(f, g, h):
    assert (f * g) * h == f * (g * h)
    assert f * (g + h) == f * g + f * h
    assert f - f == TruncatedSeries.zero(VARS, 3, FP)


def test_truncation_drops_high_terms():
    x = TruncatedSeries.variable(0, VARS, 3, Q)
    assert x**4 == TruncatedSeries.zero(VARS, 3, Q)
    assert (x**2).truncate(1) == TruncatedSeries.zero(VARS, 1, Q)
    with pytest.raises(ValueError):
        x.truncate(5)


@given(small_series, small_series, small_series)
def test_compose_matches_direct_evaluation(f, a, b):
    # images with zero constant term so truncation commutes with substitution
    a = a - a.constant_term()
    b = b - b.constant_term()
    x, y, z = (TruncatedSeries.variable(k, VARS, 3, FP) for k in range(3))
    direct = TruncatedSeries.zero(VARS, 3, FP)
    for key, c in f:
        term = TruncatedSeries.constant(c, VARS, 3, FP)
        for base, e in zip((a, b, z), key):
            term = term * base**e
        direct = direct + term
    assert f.compose([a, b, z]) == direct


def test_mismatched_variables():
    f = TruncatedSeries.variable(0, ("x",), 2, Q)
    g = TruncatedSeries.variable(0, ("y",), 2, Q)
    with pytest.raises(VariableMismatchError):
        f + g


def test_json_round_trip():
    f = _series({(0, 1, 0): 7, (2, 0, 1): 11})
    assert TruncatedSeries.from_json(f.to_json()) == f
    d = 4
    g = combo_taylor(CICycle(d, (1, 3), (5,)), FormSpec((0, 0, 0, 0)), index_set(d, d)[:6], 2)
    assert TruncatedSeries.from_json(g.to_json()) == g


# ---------------------------------------------------------------- Taylor terms


def _brute_contributing(d, beta, vars, N):
    """All multi-indices by counting vectors; the constraint written with Fractions."""
    out = set()
    n = len(vars)
    for a in product(range(N + 1), repeat=n):
        if sum(a) > N:
            continue
        g = [beta[i] + sum(a[j] * vars[j][i] for j in range(n)) for i in range(4)]
        fr = [Fraction(gi + 1, d) - (gi + 1) // d for gi in g]
        if fr[0] + fr[1] == 1 and fr[2] + fr[3] == 1:
            out.add(a)
    return out


@pytest.mark.parametrize("d", [4, 5])
def test_enumerator_is_complete(d):
    vars = index_set(d, d)[:7]
    for beta in index_set(d, d - 4):
        got = set()
        for combo, g in contributing_indices(d, beta, vars, 2):
            key = [0] * len(vars)
            for j in combo:
                key[j] += 1
            got.add(tuple(key))
            assert g == ExpVec(*beta) + ExpVec(*[sum(vars[j][i] for j in combo) for i in range(4)])
        assert got == _brute_contributing(d, beta, vars, 2)


@pytest.mark.parametrize("d", range(4, 9))
def test_holomorphic_periods_vanish(d):
    # k = 1, a = 0: no beta of degree d-4 satisfies the constraint
    for beta in index_set(d, d - 4):
        assert not list(contributing_indices(d, beta, [], 0))
        s = taylor_period(CICycle(d, (1,), (3,)), FormSpec(beta), index_set(d, d)[:3], 1)
        assert s.constant_term() == 0


@pytest.mark.parametrize("d", [4, 5])
def test_k2_constant_is_period(d):
    C = CICycle(d, (1, 3), (1, 5))
    for beta in index_set(d, 2 * d - 4):
        s = combo_taylor(C, FormSpec(beta, 2), index_set(d, d)[:2], 0)
        assert s.constant_term() == period_p(C, beta)


@pytest.mark.parametrize("d", [4, 5])
def test_linear_part_is_period_matrix(d):
    C = CICycle(d, (1, 3), (5,))
    P = period_matrix(CycleCombo.of(C), d)
    for r, beta in enumerate(P.rows):
        lin = combo_taylor(C, FormSpec(beta), P.cols, 1).linear_part()
        assert lin == [P.entry(r, c) for c in range(len(P.cols))]


def _swap01(v):
    return ExpVec(v[1], v[0], v[2], v[3])


@pytest.mark.parametrize("window,constant", [("reduced", True), ("raw", False)])
def test_swap_symmetry_selects_window(window, constant):
    """x0 <-> x1 maps the line x0 = z^u x1 to x0 = z^(2d-u) x1; the series must agree up to one unit."""
    d = 5
    vars = index_set(d, d)
    svars = [_swap01(v) for v in vars]
    ratios = set()
    for u in (1, 3, 7):
        for beta in index_set(d, d - 4):
            f = combo_taylor(CICycle(d, (u,), (1,)), FormSpec(beta), vars, 2, window=window)
            g = combo_taylor(CICycle(d, (2 * d - u,), (1,)), FormSpec(_swap01(beta)), svars, 2, window=window)
            assert len(f) == len(g)
            ratios |= {g.coefficient(k) / c for k, c in f}
    assert (ratios == {CycloElem.scalar(2 * d, -1)}) is constant


def test_combo_is_sum_over_lines():
    d = 5
    C = CICycle(d, (1, 3), (5, 7))
    vars = index_set(d, d)[:8]
    beta = FormSpec(index_set(d, 1)[2])
    total = combo_taylor(C, beta, vars, 2)
    pieces = [taylor_period(line, beta, vars, 2) for line in C.lines()]
    acc = pieces[0]
    for p in pieces[1:]:
        acc = acc + p
    assert total == acc
    assert combo_taylor(CycleCombo.of(C) - CycleCombo.of(C), beta, vars, 2, d=d) == TruncatedSeries.zero(vars, 2, ExactDomain(2 * d))
    with pytest.raises(ValueError):
        taylor_period(C, beta, vars, 2)


def test_modular_series_is_reduction():
    d = 5
    G = prime_fields(2 * d, 1)[0]
    C = CICycle(d, (1, 3), (7,))
    vars = index_set(d, d)[:6]
    forms = [FormSpec(b) for b in index_set(d, 1)]
    ex = taylor_system(C, forms, vars, 2)
    md = taylor_system(C, forms, vars, 2, ModularDomain(G))
    for e, m in zip(ex, md):
        assert {k: reduce_mod_prime(c, G) for k, c in e} == {k: c for k, c in m if c}


def test_bad_form_degree():
    with pytest.raises(ValueError):
        combo_taylor(CICycle(4, (1,), (1,)), FormSpec((1, 0, 0, 0)), [], 1)
