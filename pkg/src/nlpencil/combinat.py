"""Index sets, pencil parameters, and small exact arithmetic helpers."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb, floor
from typing import NamedTuple

__all__ = [
    "ExpVec",
    "PencilSpec",
    "index_set",
    "check_index_set",
    "enumerate_pencil_specs",
    "count_pencil_specs",
    "pochhammer",
    "frac_int_parts",
    "h20",
]


class ExpVec(NamedTuple):
    """Exponent vector (i0, i1, i2, i3) of a monomial in x0..x3."""

    i0: int
    i1: int
    i2: int
    i3: int

    @property
    def degree(self) -> int:
        return self.i0 + self.i1 + self.i2 + self.i3

    def __add__(self, other):  # componentwise, not tuple concatenation
        return ExpVec(self.i0 + other[0], self.i1 + other[1], self.i2 + other[2], self.i3 + other[3])

    def monomial(self) -> str:
        parts = []
        for k, e in enumerate(self):
            if e == 1:
                parts.append(f"x{k}")
            elif e > 1:
                parts.append(f"x{k}^{e}")
        return "*".join(parts) or "1"


@dataclass(frozen=True, order=True)
class PencilSpec:
    """Degree data (d, d1, d2, s1, s2, m1, m2) of a pair of curves C1, C2."""

    d: int
    d1: int
    d2: int
    s1: int
    s2: int
    m1: int
    m2: int

    def __post_init__(self):
        h = self.d // 2
        ok = (
            self.d >= 4
            and 1 <= self.d1 <= self.d2 <= h
            and 1 <= self.s1 <= h
            and 1 <= self.s2 <= h
            and 0 <= self.m1 <= min(self.d1, self.s1)
            and 0 <= self.m2 <= min(self.d2, self.s2)
        )
        if not ok:
            raise ValueError(f"invalid pencil data {self.params} for d={self.d}")

    @property
    def params(self) -> tuple[int, int, int, int, int, int]:
        return (self.d1, self.d2, self.s1, self.s2, self.m1, self.m2)

    @property
    def key(self) -> str:
        return f"d{self.d}:" + ",".join(map(str, self.params))

    @classmethod
    def parse(cls, d: int, text: str) -> "PencilSpec":
        vals = [int(v) for v in text.replace("(", "").replace(")", "").split(",")]
        if len(vals) != 6:
            raise ValueError(f"expected six integers d1,d2,s1,s2,m1,m2, got {text!r}")
        return cls(d, *vals)


@lru_cache(maxsize=None)
def index_set(d: int, N: int) -> tuple[ExpVec, ...]:
    """All exponent vectors with entries in [0, d-2] summing to N, lexicographic."""
    top = d - 2
    out = []
    for i0 in range(min(top, N) + 1):
        for i1 in range(min(top, N - i0) + 1):
            for i2 in range(min(top, N - i0 - i1) + 1):
                i3 = N - i0 - i1 - i2
                if i3 <= top:
                    out.append(ExpVec(i0, i1, i2, i3))
    return tuple(out)


@lru_cache(maxsize=None)
def check_index_set(d: int) -> tuple[ExpVec, ...]:
    """Exponents of degree 2d-4 with i0+i1 = i2+i3 = d-2."""
    m = d - 2
    return tuple(ExpVec(a, m - a, b, m - b) for a in range(m + 1) for b in range(m + 1))


def in_check_index_set(d: int, v) -> bool:
    m = d - 2
    return (
        v[0] + v[1] == m
        and v[2] + v[3] == m
        and min(v) >= 0
        and max(v) <= m
    )


def h20(d: int) -> int:
    return comb(d - 1, 3)


def enumerate_pencil_specs(d: int) -> list[PencilSpec]:
    """Every admissible (d1,d2,s1,s2,m1,m2); d1 <= d2 unordered, (s1,s2) ordered."""
    if d < 4:
        raise ValueError("d must be at least 4")
    h = d // 2
    out = []
    for d1 in range(1, h + 1):
        for d2 in range(d1, h + 1):
            for s1 in range(1, h + 1):
                for s2 in range(1, h + 1):
                    for m1 in range(min(d1, s1) + 1):
                        for m2 in range(min(d2, s2) + 1):
                            out.append(PencilSpec(d, d1, d2, s1, s2, m1, m2))
    return out


def count_pencil_specs(d: int) -> int:
    """Closed-form count: sum over d1 <= d2 of S(d1) * S(d2)."""
    h = d // 2

    def S(e: int) -> int:
        return sum(min(e, s) + 1 for s in range(1, h + 1))

    return sum(S(a) * S(b) for a in range(1, h + 1) for b in range(a, h + 1))


def pochhammer(x: Fraction | int, y: int) -> Fraction:
    """Rising factorial x(x+1)...(x+y-1); (x)_0 = 1."""
    if y < 0:
        raise ValueError("pochhammer length must be non-negative")
    x = Fraction(x)
    out = Fraction(1)
    for k in range(y):
        out *= x + k
    return out


def frac_int_parts(r: Fraction | int) -> tuple[int, Fraction]:
    """([r], {r}) with [r] <= r < [r] + 1."""
    r = Fraction(r)
    n = floor(r)
    return n, r - n
