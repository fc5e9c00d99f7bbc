from __future__ import annotations

import pytest

from nlpencil.combinat import PencilSpec, enumerate_pencil_specs
from nlpencil.cycles import CycleCombo, build_c1_c2
from nlpencil.deform import (
    DeformSpace,
    DegenerateDeformationError,
    TransversalityScanner,
    default_r_grid,
    deform_space,
    nt_scan,
    transversal,
)
from nlpencil.linalg import CycloMatrix, rank
from nlpencil.tangent import as_matrix, generic_codim


def test_grid():
    grid = default_r_grid()
    assert (1, 0) in grid and (2, 0) not in grid and (10, -9) in grid
    assert all(1 <= a <= 10 and abs(b) <= 10 for a, b in grid)
    assert len(grid) == len(set(grid))


@pytest.mark.parametrize("params", [(1, 2, 1, 2, 1, 0), (2, 2, 1, 2, 0, 1), (1, 1, 2, 2, 1, 1)])
def test_istar_is_complement(params):
    d = 5
    spec = PencilSpec(d, *params)
    C1, C2 = build_c1_c2(spec)
    ds = deform_space(C1, C2, d, "exact", spec)
    A = CycloMatrix.vstack(as_matrix(CycleCombo.of(C1), d), as_matrix(CycleCombo.of(C2), d))
    a4 = rank(A)
    assert len(ds) == a4
    # the I* columns alone carry the full rank: W meets the intersection trivially
    assert rank(A.submatrix(range(A.nrows), ds.columns)) == a4
    assert list(ds.columns) == sorted(ds.columns)


def test_modular_istar_matches_exact():
    spec = PencilSpec(6, 1, 2, 1, 2, 1, 1)
    C1, C2 = build_c1_c2(spec)
    assert deform_space(C1, C2, 6, "exact").istar == deform_space(C1, C2, 6, "modular").istar


def test_restriction_never_loses_rank():
    """Literal transversality holds for every member (W is a true complement)."""
    d = 5
    for spec in enumerate_pencil_specs(d)[::5]:
        C1, C2 = build_c1_c2(spec)
        ds = deform_space(C1, C2, d, "exact", spec)
        sc = TransversalityScanner(C1, C2, ds, "exact")
        for r1, r2 in [(1, 0), (1, -1), (2, 1), (3, -7)]:
            full, restricted = sc.ranks(r1, r2)
            assert full == restricted
            assert transversal(CycleCombo.pencil(C1, C2, r1, r2), ds, "exact")


def test_nt_pairs_are_rank_jumps():
    spec = PencilSpec(6, 1, 2, 1, 2, 1, 1)
    C1, C2 = build_c1_c2(spec)
    a3, _, _ = generic_codim(C1, C2, 6)
    nt = nt_scan(spec)
    assert nt == [(1, -1), (1, 0)]
    ds = deform_space(C1, C2, 6, "exact", spec)
    sc = TransversalityScanner(C1, C2, ds, "exact")
    assert all(sc.ranks(*p)[1] != a3 for p in nt)


def test_deform_space_json_round_trip():
    spec = PencilSpec(5, 1, 2, 1, 2, 1, 0)
    ds = deform_space(*build_c1_c2(spec), 5, "exact", spec)
    assert DeformSpace.from_json(ds.to_json()) == ds


def test_degenerate():

    with pytest.raises(DegenerateDeformationError):
        deform_space(CycleCombo(()), CycleCombo(()), 4)
