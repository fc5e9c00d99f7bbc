from __future__ import annotations

from fractions import Fraction

import pytest

from nlpencil.combinat import PencilSpec, index_set
from nlpencil.cycles import (
    CICycle,
    CycleCombo,
    PeriodCache,
    PeriodMatrix,
    build_c1_c2,
    period_matrix,
    period_p,
)
from nlpencil.cyclo import CycloElem, root_power


def brute_period(cycle, i):
    """Sum over the lines of the cycle of zeta^{u(i0+1) + v(i2+1)}."""
    d = cycle.d
    if not (i[0] + i[1] == d - 2 and i[2] + i[3] == d - 2):
        return CycloElem.zero(2 * d)
    acc = CycloElem.zero(2 * d)
    for u in cycle.B0:
        for v in cycle.B1:
            acc = acc + root_power(d, u * (i[0] + 1) + v * (i[2] + 1))
    return acc


def test_cycle_validation():
    with pytest.raises(ValueError):
        CICycle(4, (2,), (1,))
    with pytest.raises(ValueError):
        CICycle(4, (1, 1), (1,))
    with pytest.raises(ValueError):
        CICycle(4, (), (1,))
    with pytest.raises(ValueError):
        CICycle(4, (9,), (1,))
    assert CICycle(4, (5, 1), (3,)).B0 == (1, 5)


def test_build_c1_c2():
    C1, C2 = build_c1_c2(PencilSpec(8, 3, 3, 1, 1, 0, 0))
    assert C1 == CICycle(8, (1, 3, 5), (1, 3, 5))
    assert C2 == CICycle(8, (7,), (7,))
    C1, C2 = build_c1_c2(PencilSpec(6, 1, 2, 1, 2, 1, 1))
    assert C1 == CICycle(6, (1,), (1, 3)) and C2 == CICycle(6, (1,), (1, 5))


@pytest.mark.parametrize("d", [4, 5, 6])
def test_period_p_brute_force(d):
    cyc = CICycle(d, (1, 3), (2 * d - 1,))
    for i in index_set(d, 2 * d - 4):
        assert period_p(cyc, i) == brute_period(cyc, i)


def test_period_p_degree_check():
    with pytest.raises(ValueError):
        period_p(CICycle(4, (1,), (1,)), (1, 1, 1, 0))


def test_period_matrix_is_linear():
    d = 5
    A, B = CICycle(d, (1,), (3,)), CICycle(d, (1, 5), (7,))
    combo = CycleCombo.of((Fraction(2, 3), A), (-4, B))
    M = period_matrix(combo, d)
    MA, MB = period_matrix(CycleCombo.of(A), d), period_matrix(CycleCombo.of(B), d)
    nr, nc = M.shape
    for r in range(nr):
        for c in range(nc):
            assert M.entry(r, c) == MA.entry(r, c) * Fraction(2, 3) - MB.entry(r, c) * 4


def test_period_matrix_entries_brute_force():
    d = 4
    line = CICycle(d, (1,), (3,))
    M = period_matrix(CycleCombo.of(line), d)
    rows, cols = index_set(d, 0), index_set(d, 4)
    assert M.shape == (1, 19)
    assert len(M.entries) == 9
    for r, i in enumerate(rows):
        for c, j in enumerate(cols):
            assert M.entry(r, c) == brute_period(line, i + j)


def test_combo_cancellation():
    C = CICycle(5, (1, 3), (5,))
    assert not (CycleCombo.of(C) - CycleCombo.of(C))


def test_period_matrix_json_round_trip():
    M = period_matrix(CycleCombo.of(CICycle(5, (1, 3), (5,))), 5)
    assert PeriodMatrix.from_json(M.to_json()) == M


def test_period_cache(tmp_path):
    cache = PeriodCache(tmp_path)
    cyc = CICycle(5, (1, 3), (5,))
    first = cache.get(cyc)
    assert cache.path(cyc).exists()
    assert cache.get(cyc) == first == period_matrix(CycleCombo.of(cyc), 5)
    assert cache.key(cyc) != cache.key(cyc.swapped())
