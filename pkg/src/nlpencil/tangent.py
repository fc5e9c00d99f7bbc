"""Tangent-space codimensions and the General / Inclusion / Candidate split.

For cycles C1, C2 the report carries

    a1 = codim T V_[C1],  a2 = codim T V_[C2],
    a3 = codim T V_[C1] + r [C2] at generic r,
    a4 = codim (T V_[C1] /\\ T V_[C2])   (rank of the stacked matrices).

"Generic r" follows a fixed protocol: the codimension at the sentinel
r = 11, then the same value is checked at r = 2, ..., a3 + 3.  A pencil is
General when a3 = h20 and a3 != a4, Inclusion when a3 = a4, and a Candidate
otherwise.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .combinat import PencilSpec, h20 as hodge_h20, index_set
from .cycles import CICycle, CycleCombo, build_c1_c2, period_matrix
from .cyclo import prime_fields
from .linalg import CycloMatrix, rank, rank_mod_p_array

__all__ = [
    "GENERIC_SENTINEL",
    "TangentReport",
    "PencilRanks",
    "grade_blocks",
    "as_matrix",
    "tangent_codim",
    "intersection_codim",
    "generic_codim",
    "classify_pencil",
    "resolve_method",
]

GENERIC_SENTINEL = 11

GENERAL = "General"
INCLUSION = "Inclusion"
CANDIDATE = "Candidate"


def resolve_method(d: int, method: str) -> str:
    """``auto`` means exact elimination up to d = 7 and two primes above."""
    if method == "auto":
        return "exact" if d <= 7 else "modular"
    if method not in ("exact", "modular"):
        raise ValueError(f"unknown method {method!r}")
    return method


@lru_cache(maxsize=None)
def grade_blocks(d: int) -> tuple[tuple[tuple[int, ...], tuple[int, ...]], ...]:
    """Row/column index blocks of [p_{i+j}].

    Entry (i, j) can be nonzero only if i0 + i1 + j0 + j1 = d - 2, so the
    matrix is block diagonal in s = i0 + i1 (columns with j0 + j1 = d-2-s).
    """
    rows = index_set(d, d - 4)
    cols = index_set(d, d)
    out = []
    for s in range(d - 3):
        rs = tuple(k for k, i in enumerate(rows) if i[0] + i[1] == s)
        cs = tuple(k for k, j in enumerate(cols) if j[0] + j[1] == d - 2 - s)
        out.append((rs, cs))
    return tuple(out)


def as_matrix(combo: CycleCombo, d: int) -> CycloMatrix:
    pm = period_matrix(combo, d)
    nr, nc = pm.shape
    return CycloMatrix(nr, nc, 2 * d, pm.entries)


def _block_rank(M: CycloMatrix, d: int, method: str) -> int:
    return sum(rank(M.submatrix(rs, cs), method) for rs, cs in grade_blocks(d))


def tangent_codim(combo: CycleCombo, d: int, method: str = "auto") -> int:
    """codim T_0 V_delta = rank of [p_{i+j}(delta)]."""
    if not combo:
        raise ValueError("tangent space of the zero cycle is the whole space")
    return _block_rank(as_matrix(combo, d), d, resolve_method(d, method))


def intersection_codim(C1: CycleCombo, C2: CycleCombo, d: int, method: str = "auto") -> int:
    """codim of T V_C1 /\\ T V_C2: rank of the vertical concatenation."""
    method = resolve_method(d, method)
    A = CycloMatrix.vstack(as_matrix(C1, d), as_matrix(C2, d))
    nr = len(index_set(d, d - 4))
    total = 0
    for rs, cs in grade_blocks(d):
        total += rank(A.submatrix(list(rs) + [r + nr for r in rs], cs), method)
    return total


class PencilRanks:
    """Ranks of r1 [p(C1)] + r2 [p(C2)] for many (r1, r2), block by block.

    In ``modular`` mode both matrices are reduced once per prime and every
    pencil member costs only residue arithmetic; the reported rank is the
    maximum over the primes (a lower bound of the exact rank).
    """

    def __init__(self, C1: CycleCombo | CICycle, C2: CycleCombo | CICycle, d: int, method: str = "auto"):
        self.d = d
        self.method = resolve_method(d, method)
        if isinstance(C1, CICycle):
            C1 = CycleCombo.of(C1)
        if isinstance(C2, CICycle):
            C2 = CycleCombo.of(C2)
        self.M1 = as_matrix(C1, d)
        self.M2 = as_matrix(C2, d)
        self.blocks = grade_blocks(d)
        self._exact = [(self.M1.submatrix(rs, cs), self.M2.submatrix(rs, cs)) for rs, cs in self.blocks]
        self._mod: list[tuple[int, list[tuple[np.ndarray, np.ndarray]]]] = []
        if self.method == "modular":
            for F in prime_fields(2 * d, 2):
                self._mod.append((F.p, [(B1.reduce(F), B2.reduce(F)) for B1, B2 in self._exact]))
        self._cache: dict[tuple[Fraction, Fraction], int] = {}

    def rank(self, r1, r2) -> int:
        r1, r2 = Fraction(r1), Fraction(r2)
        key = (r1, r2)
        if key in self._cache:
            return self._cache[key]
        if self.method == "exact":
            total = 0
            for B1, B2 in self._exact:
                total += rank(_combine(B1, B2, r1, r2), "exact")
        else:
            total = max(self._rank_mod(p, blocks, r1, r2) for p, blocks in self._mod)
        self._cache[key] = total
        return total

    @staticmethod
    def _rank_mod(p: int, blocks, r1: Fraction, r2: Fraction) -> int:
        # scale by the common denominator; rank is unchanged
        den = r1.denominator * r2.denominator // np.gcd(r1.denominator, r2.denominator)
        c1 = int(r1 * den) % p
        c2 = int(r2 * den) % p
        return sum(rank_mod_p_array((c1 * A1 + c2 * A2) % p, p) for A1, A2 in blocks)

    def concat_rank(self) -> int:
        if self.method == "exact":
            return sum(rank(CycloMatrix.vstack(B1, B2), "exact") for B1, B2 in self._exact)
        best = 0
        for p, blocks in self._mod:
            best = max(best, sum(rank_mod_p_array(np.vstack([A1, A2]), p) for A1, A2 in blocks))
        return best


def _combine(B1: CycloMatrix, B2: CycloMatrix, r1: Fraction, r2: Fraction) -> CycloMatrix:
    if r2 == 0:
        return B1.scaled(r1)
    if r1 == 0:
        return B2.scaled(r2)
    return B1.scaled(r1) + B2.scaled(r2)


def generic_codim(
    C1: CycleCombo | CICycle,
    C2: CycleCombo | CICycle,
    d: int,
    method: str = "auto",
    sentinel: int = GENERIC_SENTINEL,
    ranks: PencilRanks | None = None,
) -> tuple[int, bool, dict[int, int]]:
    """Codimension of the generic member of the pencil C1 + r C2.

    Returns (a3, stabilized, per_r).  a3 is the largest codimension seen;
    stabilized means every r in 2..a3+3 agreed with the sentinel.
    """
    ranks = ranks or PencilRanks(C1, C2, d, method)
    per_r = {sentinel: ranks.rank(1, sentinel)}
    a3 = per_r[sentinel]
    r = 2
    while r <= a3 + 3:
        per_r[r] = ranks.rank(1, r)
        a3 = max(a3, per_r[r])
        r += 1
    stabilized = len(set(per_r.values())) == 1
    return a3, stabilized, dict(sorted(per_r.items()))


@dataclass
class TangentReport:
    spec: PencilSpec
    a1: int
    a2: int
    a3: int
    a4: int
    h20: int
    classification: str
    stabilized: bool
    per_r: dict[int, int] = field(default_factory=dict)
    method: str = "exact"

    @property
    def codims(self) -> tuple[int, int, int, int]:
        return (self.a1, self.a2, self.a3, self.a4)

    def to_json(self) -> dict:
        out = asdict(self)
        out["spec"] = {"d": self.spec.d, "params": list(self.spec.params)}
        out["per_r"] = {str(k): v for k, v in self.per_r.items()}
        return out

    @classmethod
    def from_json(cls, data: dict) -> "TangentReport":
        data = dict(data)
        sp = data.pop("spec")
        data["per_r"] = {int(k): v for k, v in data.get("per_r", {}).items()}
        return cls(spec=PencilSpec(sp["d"], *sp["params"]), **data)


def classify(a3: int, a4: int, h: int) -> str:
    if a3 == a4:
        return INCLUSION
    if a3 == h:
        return GENERAL
    return CANDIDATE


def classify_pencil(spec: PencilSpec, method: str = "auto", sentinel: int = GENERIC_SENTINEL) -> TangentReport:
    """Full tangent report and classification of the pencil of ``spec``."""
    d = spec.d
    method = resolve_method(d, method)
    C1, C2 = build_c1_c2(spec)
    ranks = PencilRanks(C1, C2, d, method)
    a1 = ranks.rank(1, 0)
    a2 = ranks.rank(0, 1)
    a4 = ranks.concat_rank()
    a3, stabilized, per_r = generic_codim(C1, C2, d, ranks=ranks, sentinel=sentinel)
    h = hodge_h20(d)
    return TangentReport(spec, a1, a2, a3, a4, h, classify(a3, a4, h), stabilized, per_r, method)
