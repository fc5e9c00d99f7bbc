from __future__ import annotations

from itertools import combinations, permutations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from nlpencil.cyclo import CycloElem, euler_phi, prime_fields
from nlpencil.linalg import (
    CycloMatrix,
    certified_rank,
    determinant,
    kernel_basis,
    nonsingular_minor,
    rank,
    rank_modular,
)

ORDER = 8


def leibniz(rows):
    """Determinant by the permutation expansion, no elimination involved."""
    n = len(rows)
    acc = CycloElem.zero(ORDER)
    for perm in permutations(range(n)):
        sign = 1
        for i in range(n):
            for j in range(i + 1, n):
                if perm[i] > perm[j]:
                    sign = -sign
        term = CycloElem.scalar(ORDER, sign)
        for i in range(n):
            term = term * rows[i][perm[i]]
        acc = acc + term
    return acc


def minor_rank(M: CycloMatrix) -> int:
    dense = M.dense()
    for k in range(min(M.shape), 0, -1):
        for rs in combinations(range(M.nrows), k):
            for cs in combinations(range(M.ncols), k):
                if leibniz([[dense[r][c] for c in cs] for r in rs]):
                    return k
    return 0


small = st.integers(-2, 2)
# entries are often zero or repeated so that rank deficiency actually happens
entry = st.one_of(
    st.just(CycloElem.zero(ORDER)),
    st.lists(small, min_size=euler_phi(ORDER), max_size=euler_phi(ORDER)).map(lambda c: CycloElem.make(ORDER, c)),
)


@st.composite
def matrices(draw, max_dim=4):
    nr = draw(st.integers(1, max_dim))
    nc = draw(st.integers(1, max_dim))
    rows = [[draw(entry) for _ in range(nc)] for _ in range(nr)]
    if nr > 1 and draw(st.booleans()):
        # plant a dependent row
        a = draw(entry)
        rows[-1] = [x * a + y for x, y in zip(rows[0], rows[1 % nr])]
    return CycloMatrix.from_rows(rows, ORDER)


@given(matrices())
def test_rank_equals_minor_rank(M):
    assert rank(M, "exact") == minor_rank(M)


@given(matrices())
def test_kernel_is_annihilated(M):
    K = kernel_basis(M)
    assert len(K) == M.ncols - rank(M)
    for v in K:
        assert not any(M.matvec(v))


@given(matrices())
def test_modular_rank_is_lower_bound_and_certified_matches(M):
    r = rank(M)
    for F in prime_fields(ORDER, 2):
        assert rank_modular(M, F) <= r
    cert = certified_rank(M)
    assert cert.certified and cert.rank == r
    assert rank(M, "certified") == r


@given(matrices())
def test_nonsingular_minor(M):
    rows, cols = nonsingular_minor(M)
    assert len(rows) == len(cols) == rank(M)
    if rows:
        assert leibniz([[M.entry(r, c) for c in cols] for r in rows])


@given(matrices(max_dim=3))
def test_determinant_matches_leibniz(M):
    n = min(M.shape)
    S = M.submatrix(range(n), range(n))
    assert determinant(S) == leibniz(S.dense())


def test_rank_of_block_diagonal_sums():
    z = CycloElem.make(ORDER, [0, 1, 0, 0])
    A = CycloMatrix.from_rows([[z, 0, 0], [z * z, 0, 0], [0, 1, 1]], ORDER)
    assert rank(A) == 2
    assert len(A.components()) == 2


def test_unknown_method():
    with pytest.raises(ValueError):
        rank(CycloMatrix.identity(2, ORDER), "fast")
