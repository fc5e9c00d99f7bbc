"""Complete-intersection cycles on the Fermat surface and their periods.

A cycle is stored by two sets of odd exponents ``B0``, ``B1``: the curve is
the union of the lines x0 = zeta^u x1, x2 = zeta^v x3 for u in B0, v in B1,
with zeta = zeta_{2d}.  Its period against the form indexed by i in the
set I^_{2d-4} is

    p_i = (sum_{u in B0} zeta^{u (i0+1)}) * (sum_{v in B1} zeta^{v (i2+1)})

and zero off that set.  The true integral carries the extra constant
2 pi sqrt(-1) / d^2, which is dropped here: kernels and ranks do not see it.
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from pathlib import Path
from typing import Iterable, Iterator, Sequence

from .combinat import ExpVec, PencilSpec, in_check_index_set, index_set
from .cyclo import CycloElem, PrimeField, power_sum, reduce_mod_prime

__all__ = [
    "CICycle",
    "CycleCombo",
    "PeriodMatrix",
    "build_c1_c2",
    "period_p",
    "period_table",
    "period_matrix",
    "PeriodCache",
]


@dataclass(frozen=True)
class CICycle:
    """Union of |B0| * |B1| lines; exponents are odd residues mod 2d."""

    d: int
    B0: tuple[int, ...]
    B1: tuple[int, ...]

    def __post_init__(self):
        n = 2 * self.d
        for B in (self.B0, self.B1):
            if not B:
                raise ValueError("exponent sets must be non-empty")
            if len(set(B)) != len(B):
                raise ValueError(f"repeated exponent in {B}")
            if any(u % 2 == 0 or not 0 < u < n for u in B):
                raise ValueError(f"exponents must be odd in [1, {n - 1}]: {B}")
        object.__setattr__(self, "B0", tuple(sorted(self.B0)))
        object.__setattr__(self, "B1", tuple(sorted(self.B1)))

    def lines(self) -> Iterator["CICycle"]:
        for u in self.B0:
            for v in self.B1:
                yield CICycle(self.d, (u,), (v,))

    @property
    def is_line(self) -> bool:
        return len(self.B0) == 1 and len(self.B1) == 1

    def swapped(self) -> "CICycle":
        return CICycle(self.d, self.B1, self.B0)

    def to_json(self) -> dict:
        return {"d": self.d, "B0": list(self.B0), "B1": list(self.B1)}


@dataclass(frozen=True)
class CycleCombo:
    """Rational linear combination of distinct cycles of one degree."""

    terms: tuple[tuple[Fraction, CICycle], ...]

    def __post_init__(self):
        merged: dict[CICycle, Fraction] = {}
        for c, cyc in self.terms:
            merged[cyc] = merged.get(cyc, Fraction(0)) + Fraction(c)
        terms = tuple((c, cyc) for cyc, c in merged.items() if c != 0)
        if len({cyc.d for _, cyc in terms}) > 1:
            raise ValueError("cycles of different degrees")
        object.__setattr__(self, "terms", terms)

    @classmethod
    def of(cls, *pairs) -> "CycleCombo":
        """``CycleCombo.of((1, C1), (r, C2))`` or ``CycleCombo.of(C)``."""
        terms = []
        for item in pairs:
            if isinstance(item, CICycle):
                terms.append((Fraction(1), item))
            else:
                c, cyc = item
                terms.append((Fraction(c), cyc))
        return cls(tuple(terms))

    @classmethod
    def pencil(cls, C1: CICycle, C2: CICycle, r1, r2) -> "CycleCombo":
        return cls(((Fraction(r1), C1), (Fraction(r2), C2)))

    def __bool__(self) -> bool:
        return bool(self.terms)

    def scaled(self, q) -> "CycleCombo":
        return CycleCombo(tuple((c * Fraction(q), cyc) for c, cyc in self.terms))

    def __add__(self, other: "CycleCombo") -> "CycleCombo":
        return CycleCombo(self.terms + other.terms)

    def __sub__(self, other: "CycleCombo") -> "CycleCombo":
        return self + other.scaled(-1)

    def lines(self) -> Iterator[tuple[Fraction, CICycle]]:
        for c, cyc in self.terms:
            for line in cyc.lines():
                yield c, line


def build_c1_c2(spec: PencilSpec) -> tuple[CICycle, CICycle]:
    """The curves C1: f1 f3 = f2 f4 = 0 and C2: f1 f5 = f2 f6 = 0."""
    d = spec.d
    odd = lambda lo, hi: [2 * i + 1 for i in range(lo, hi)]
    c1 = CICycle(d, tuple(odd(0, spec.d1)), tuple(odd(0, spec.d2)))
    c2 = CICycle(
        d,
        tuple(odd(0, spec.m1) + odd(spec.d1, spec.d1 + spec.s1 - spec.m1)),
        tuple(odd(0, spec.m2) + odd(spec.d2, spec.d2 + spec.s2 - spec.m2)),
    )
    return c1, c2


def period_p(cycle: CICycle, i: Sequence[int]) -> CycloElem:
    """Period number p_i of ``cycle`` for an exponent of degree 2d-4."""
    d = cycle.d
    if sum(i) != 2 * d - 4:
        raise ValueError(f"exponent {tuple(i)} does not have degree {2 * d - 4}")
    if not in_check_index_set(d, i):
        return CycloElem.zero(2 * d)
    return power_sum(d, cycle.B0, i[0] + 1) * power_sum(d, cycle.B1, i[2] + 1)


def period_table(combo: CycleCombo, d: int, exps: Iterable[int] | None = None) -> dict[tuple[int, int], CycloElem]:
    """P(e0, e2) = sum_k c_k S0_k(e0) S1_k(e2) for exponents e0, e2.

    With the default exponents 1..d-1 this is p_i at e0 = i0+1, e2 = i2+1.
    """
    exps = list(range(1, d)) if exps is None else list(exps)
    zero = CycloElem.zero(2 * d)
    table = {}
    for e0 in exps:
        for e2 in exps:
            acc = zero
            for c, cyc in combo.terms:
                if cyc.d != d:
                    raise ValueError("cycle degree mismatch")
                acc = acc + power_sum(d, cyc.B0, e0) * power_sum(d, cyc.B1, e2) * c
            table[(e0, e2)] = acc
    return table


@dataclass(frozen=True)
class PeriodMatrix:
    """Sparse matrix [p_{i+j}] with rows I_{d-4} and columns I_d."""

    d: int
    entries: dict  # (row index, col index) -> nonzero CycloElem

    @property
    def rows(self) -> tuple[ExpVec, ...]:
        return index_set(self.d, self.d - 4)

    @property
    def cols(self) -> tuple[ExpVec, ...]:
        return index_set(self.d, self.d)

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.rows), len(self.cols)

    def entry(self, r: int, c: int) -> CycloElem:
        return self.entries.get((r, c)) or CycloElem.zero(2 * self.d)

    def dense(self) -> list[list[CycloElem]]:
        nr, nc = self.shape
        return [[self.entry(r, c) for c in range(nc)] for r in range(nr)]

    def __eq__(self, other) -> bool:
        return isinstance(other, PeriodMatrix) and self.d == other.d and self.entries == other.entries

    def __hash__(self) -> int:
        return hash((self.d, frozenset(self.entries.items())))

    def scaled(self, q) -> "PeriodMatrix":
        q = Fraction(q)
        if q == 0:
            return PeriodMatrix(self.d, {})
        return PeriodMatrix(self.d, {k: v * q for k, v in self.entries.items()})

    def reduce(self, F: PrimeField):
        """Dense int64 array of residues under zeta -> F.w."""
        import numpy as np

        out = np.zeros(self.shape, dtype=np.int64)
        for (r, c), v in self.entries.items():
            out[r, c] = reduce_mod_prime(v, F)
        return out

    def to_json(self) -> dict:
        return {
            "d": self.d,
            "rows": [list(v) for v in self.rows],
            "cols": [list(v) for v in self.cols],
            "entries": [[r, c, v.to_json()["coeffs"]] for (r, c), v in sorted(self.entries.items())],
        }

    @classmethod
    def from_json(cls, data: dict) -> "PeriodMatrix":
        d = int(data["d"])
        if [tuple(v) for v in data["rows"]] != [tuple(v) for v in index_set(d, d - 4)]:
            raise ValueError("row index list does not match I_{d-4}")
        if [tuple(v) for v in data["cols"]] != [tuple(v) for v in index_set(d, d)]:
            raise ValueError("column index list does not match I_d")
        entries = {
            (r, c): CycloElem.from_rationals(2 * d, [Fraction(x) for x in coeffs])
            for r, c, coeffs in data["entries"]
        }
        return cls(d, entries)


@lru_cache(maxsize=None)
def _support(d: int) -> tuple[tuple[int, int, int, int], ...]:
    """(row, col, e0, e2) for every (i, j) with i + j in I^_{2d-4}."""
    out = []
    rows = index_set(d, d - 4)
    cols = index_set(d, d)
    for r, i in enumerate(rows):
        for c, j in enumerate(cols):
            s = i + j
            if in_check_index_set(d, s):
                out.append((r, c, s[0] + 1, s[2] + 1))
    return tuple(out)


def period_matrix(combo: CycleCombo, d: int) -> PeriodMatrix:
    """[p_{i+j}] of a rational combination of cycles (Q-linear in ``combo``)."""
    table = period_table(combo, d)
    entries = {}
    for r, c, e0, e2 in _support(d):
        v = table[(e0, e2)]
        if v:
            entries[(r, c)] = v
    return PeriodMatrix(d, entries)


class PeriodCache:
    """On-disk cache of single-cycle period matrices, one JSON file per cycle.

    Files are named by a content hash of (d, B0, B1).  Writes go through a
    temporary file and an atomic rename.
    """

    def __init__(self, root: str | os.PathLike):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)

    @staticmethod
    def key(cycle: CICycle) -> str:
        blob = json.dumps(cycle.to_json(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:24]

    def path(self, cycle: CICycle) -> Path:
        return self.root / f"periods-{self.key(cycle)}.json"

    def get(self, cycle: CICycle) -> PeriodMatrix:
        path = self.path(cycle)
        if path.exists():
            data = json.loads(path.read_text())
            if data.get("cycle") == cycle.to_json():
                return PeriodMatrix.from_json(data["matrix"])
        mat = period_matrix(CycleCombo.of(cycle), cycle.d)
        tmp = path.with_suffix(".tmp")
        tmp.write_text(json.dumps({"cycle": cycle.to_json(), "matrix": mat.to_json()}))
        tmp.replace(path)
        return mat
