"""Reduced deformation spaces and transversality scans.

Given cycles C1, C2, stack their period matrices into A.  The columns of a
nonsingular rank-size minor of A (first pivots in lexicographic column
order) index monomials x^i, i in I*, spanning a complement W of
T V_C1 /\\ T V_C2.

Restricting a member's period matrix to the I* columns never loses rank
(W is a genuine complement, so T V_delta + W is everything for every delta
in the pencil).  The scan therefore compares the restricted rank with the
generic codimension a3 instead: a pair (r1, r2) is flagged when its member
jumps away from the generic tangent space.  ``reference=None`` keeps the
plain full-versus-restricted comparison available.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterable

from .combinat import ExpVec, PencilSpec, index_set
from .cycles import CICycle, CycleCombo, build_c1_c2
from .cyclo import prime_fields
from .linalg import CycloMatrix, nonsingular_minor, pivots_mod_p_array, rank, rank_mod_p_array
from .tangent import as_matrix, generic_codim, grade_blocks, resolve_method

__all__ = [
    "DegenerateDeformationError",
    "DeformSpace",
    "deform_space",
    "transversal",
    "TransversalityScanner",
    "default_r_grid",
    "nt_scan",
]


class DegenerateDeformationError(ValueError):
    """Both period matrices vanish; there is nothing to complement."""


@dataclass(frozen=True)
class DeformSpace:
    d: int
    istar: tuple[ExpVec, ...]
    columns: tuple[int, ...]  # positions of istar inside index_set(d, d)
    source_spec: PencilSpec | None = None

    def __len__(self) -> int:
        return len(self.istar)

    def to_json(self) -> dict:
        return {
            "d": self.d,
            "istar": [list(v) for v in self.istar],
            "spec": list(self.source_spec.params) if self.source_spec else None,
        }

    @classmethod
    def from_json(cls, data: dict) -> "DeformSpace":
        d = int(data["d"])
        cols = index_set(d, d)
        pos = {tuple(v): k for k, v in enumerate(cols)}
        istar = tuple(ExpVec(*v) for v in data["istar"])
        spec = PencilSpec(d, *data["spec"]) if data.get("spec") else None
        return cls(d, istar, tuple(pos[tuple(v)] for v in istar), spec)


def _as_combo(x) -> CycleCombo:
    return CycleCombo.of(x) if isinstance(x, CICycle) else x


def deform_space(
    C1: CycleCombo | CICycle,
    C2: CycleCombo | CICycle,
    d: int,
    method: str = "auto",
    spec: PencilSpec | None = None,
) -> DeformSpace:
    """Monomials spanning W with T_0 T = (T V_C1 /\\ T V_C2) + W (direct sum)."""
    method = resolve_method(d, method)
    M1 = as_matrix(_as_combo(C1), d)
    M2 = as_matrix(_as_combo(C2), d)
    if M1.is_zero() and M2.is_zero():
        raise DegenerateDeformationError("zero concatenation: both cycles have vanishing periods")
    cols: list[int] = []
    for rs, cs in grade_blocks(d):
        block = CycloMatrix.vstack(M1.submatrix(rs, cs), M2.submatrix(rs, cs))
        if method == "exact":
            _, local = nonsingular_minor(block)
        else:
            # the lexicographic greedy column basis; keep the larger one if primes disagree
            local = []
            for F in prime_fields(2 * d, 2):
                piv = sorted(c for _, c in pivots_mod_p_array(block.reduce(F), F.p))
                if len(piv) > len(local):
                    local = piv
        cols.extend(cs[c] for c in local)
    cols.sort()
    allcols = index_set(d, d)
    return DeformSpace(d, tuple(allcols[c] for c in cols), tuple(cols), spec)


class TransversalityScanner:
    """Compares full and I*-restricted ranks of pencil members."""

    def __init__(self, C1, C2, ds: DeformSpace, method: str = "auto", reference: int | None = None):
        d = ds.d
        self.reference = reference
        self.d = d
        self.ds = ds
        self.method = resolve_method(d, method)
        M1 = as_matrix(_as_combo(C1), d)
        M2 = as_matrix(_as_combo(C2), d)
        keep = set(ds.columns)
        self._blocks = []
        for rs, cs in grade_blocks(d):
            sub = [k for k, c in enumerate(cs) if c in keep]
            self._blocks.append((M1.submatrix(rs, cs), M2.submatrix(rs, cs), sub))
        self._mod = []
        if self.method == "modular":
            for F in prime_fields(2 * d, 2):
                self._mod.append((F.p, [(B1.reduce(F), B2.reduce(F), sub) for B1, B2, sub in self._blocks]))

    def ranks(self, r1, r2) -> tuple[int, int]:
        """(rank of the full member, rank of its I*-column restriction)."""
        r1, r2 = Fraction(r1), Fraction(r2)
        if self.method == "exact":
            full = restricted = 0
            for B1, B2, sub in self._blocks:
                B = B1.scaled(r1) + B2.scaled(r2)
                full += rank(B, "exact")
                restricted += rank(B.submatrix(range(B.nrows), sub), "exact") if sub else 0
            return full, restricted
        den = r1.denominator * r2.denominator
        best = (0, 0)
        for p, blocks in self._mod:
            c1, c2 = int(r1 * den) % p, int(r2 * den) % p
            full = restricted = 0
            for A1, A2, sub in blocks:
                A = (c1 * A1 + c2 * A2) % p
                full += rank_mod_p_array(A, p)
                restricted += rank_mod_p_array(A[:, sub], p) if sub else 0
            best = max(best, (full, restricted))
        return best

    def transversal(self, r1, r2) -> bool:
        full, restricted = self.ranks(r1, r2)
        target = full if self.reference is None else self.reference
        return restricted == target


def transversal(combo: CycleCombo, ds: DeformSpace, method: str = "auto", reference: int | None = None) -> bool:
    """Restricted rank on I* equals ``reference`` (default: the member's own rank)."""
    method = resolve_method(ds.d, method)
    M = as_matrix(combo, ds.d)
    keep = set(ds.columns)
    full = restricted = 0
    for rs, cs in grade_blocks(ds.d):
        B = M.submatrix(rs, cs)
        sub = [k for k, c in enumerate(cs) if c in keep]
        full += rank(B, method)
        restricted += rank(B.submatrix(range(B.nrows), sub), method) if sub else 0
    return restricted == (full if reference is None else reference)


def default_r_grid(r1_max: int = 10, r2_max: int = 10, r1_min: int = 1) -> list[tuple[int, int]]:
    """Coprime (r1, r2) with r1_min <= r1 <= r1_max and |r2| <= r2_max."""
    return [
        (r1, r2)
        for r1 in range(r1_min, r1_max + 1)
        for r2 in range(-r2_max, r2_max + 1)
        if gcd(r1, r2) == 1
    ]


def nt_scan(
    spec: PencilSpec,
    r_grid: Iterable[tuple[int, int]] | None = None,
    method: str = "auto",
    ds: DeformSpace | None = None,
    reference: int | None = None,
) -> list[tuple[int, int]]:
    """Coprime grid pairs whose member's I*-restricted rank differs from a3.

    ``reference`` defaults to the generic codimension a3 of the pencil.
    """
    C1, C2 = build_c1_c2(spec)
    ds = ds or deform_space(C1, C2, spec.d, method, spec)
    if reference is None:
        reference, _, _ = generic_codim(C1, C2, spec.d, method)
    scanner = TransversalityScanner(C1, C2, ds, method, reference)
    grid = default_r_grid() if r_grid is None else r_grid
    return [(r1, r2) for r1, r2 in grid if gcd(r1, r2) == 1 and not scanner.transversal(r1, r2)]
