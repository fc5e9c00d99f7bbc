"""Exact arithmetic in the cyclotomic field Q(zeta_{2d}).

Elements are stored in the power basis 1, x, ..., x^{phi(n)-1} of
Q[x]/(Phi_n(x)) with n = 2d, as an integer numerator vector over a single
positive denominator.  The representation is canonical (gcd of numerators
and denominator is one), so equality and zero tests are exact.

Reduction to prime fields sends zeta_n to a fixed element ``w`` of
multiplicative order exactly n modulo a prime p = 1 (mod n).  This is a
ring homomorphism Z[1/D][zeta_n] -> F_p for every denominator D prime to p.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Iterable, Sequence

from sympy import factorint, isprime

__all__ = [
    "CycloElem",
    "PrimeField",
    "BadPrimeError",
    "cyclotomic_poly",
    "euler_phi",
    "root_power",
    "reduce_mod_prime",
    "prime_fields",
    "power_sum",
]


class BadPrimeError(ArithmeticError):
    """A denominator is not invertible modulo the chosen prime."""


# --------------------------------------------------------------------------
# integer polynomials (lists, low degree first)


def _trim(p: list[int]) -> list[int]:
    while p and p[-1] == 0:
        p.pop()
    return p


def _poly_mul(a: Sequence[int], b: Sequence[int]) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def _poly_divmod_monic(a: Sequence[int], m: Sequence[int]) -> tuple[list[int], list[int]]:
    """Division by a monic integer polynomial ``m``; stays in Z[x]."""
    rem = list(a)
    dm = len(m) - 1
    if len(rem) - 1 < dm:
        return [], _trim(rem)
    quot = [0] * (len(rem) - dm)
    for k in range(len(rem) - 1, dm - 1, -1):
        c = rem[k]
        if c:
            quot[k - dm] = c
            for j in range(dm + 1):
                rem[k - dm + j] -= c * m[j]
    return _trim(quot), _trim(rem[:dm])


@lru_cache(maxsize=None)
def cyclotomic_poly(n: int) -> tuple[int, ...]:
    """Coefficients (low degree first) of the n-th cyclotomic polynomial.

    Computed recursively as (x^n - 1) divided by Phi_m for every proper
    divisor m of n.
    """
    if n < 1:
        raise ValueError("order must be positive")
    num = [-1] + [0] * (n - 1) + [1]
    for m in range(1, n):
        if n % m == 0:
            q, r = _poly_divmod_monic(num, cyclotomic_poly(m))
            if r:
                raise ArithmeticError(f"Phi_{m} does not divide x^{n}-1 quotient")
            num = q
    return tuple(num)


def euler_phi(n: int) -> int:
    result = n
    for q in factorint(n):
        result -= result // q
    return result


@lru_cache(maxsize=None)
def _reduction_table(n: int) -> tuple[tuple[int, ...], ...]:
    """Power-basis vectors of x^k for 0 <= k < 2*phi(n) - 1 modulo Phi_n."""
    phi_poly = cyclotomic_poly(n)
    deg = len(phi_poly) - 1
    rows = []
    cur = [0] * deg
    cur[0] = 1
    for _ in range(2 * deg - 1):
        rows.append(tuple(cur))
        # multiply by x, then reduce the overflowing coefficient
        top = cur[-1]
        cur = [0] + cur[:-1]
        if top:
            for j in range(deg):
                cur[j] -= top * phi_poly[j]
    return tuple(rows)


@lru_cache(maxsize=None)
def _root_powers(n: int) -> tuple[tuple[int, ...], ...]:
    """Power-basis vectors of zeta_n^k for 0 <= k < n."""
    phi_poly = cyclotomic_poly(n)
    deg = len(phi_poly) - 1
    rows = []
    cur = [0] * deg
    cur[0] = 1
    for _ in range(n):
        rows.append(tuple(cur))
        top = cur[-1]
        cur = [0] + cur[:-1]
        if top:
            for j in range(deg):
                cur[j] -= top * phi_poly[j]
    return tuple(rows)


# --------------------------------------------------------------------------
# field elements


def _normalize(num: Iterable[int], den: int) -> tuple[tuple[int, ...], int]:
    num = tuple(num)
    if den < 0:
        num = tuple(-c for c in num)
        den = -den
    g = den
    for c in num:
        if c:
            g = gcd(g, c)
            if g == 1:
                break
    if not any(num):
        return num, 1
    if g != 1:
        num = tuple(c // g for c in num)
        den //= g
    return num, den


@dataclass(frozen=True, slots=True)
class CycloElem:
    """An element of Q(zeta_n), n = ``order`` (always 2d in this package)."""

    order: int
    num: tuple[int, ...]
    den: int = 1

    @classmethod
    def make(cls, order: int, num: Iterable[int], den: int = 1) -> "CycloElem":
        num, den = _normalize(num, den)
        deg = euler_phi(order)
        if len(num) != deg:
            raise ValueError(f"expected {deg} coefficients, got {len(num)}")
        return cls(order, num, den)

    @classmethod
    def from_rationals(cls, order: int, coeffs: Sequence[Fraction | int | str]) -> "CycloElem":
        fr = [Fraction(c) for c in coeffs]
        den = 1
        for c in fr:
            den = den * c.denominator // gcd(den, c.denominator)
        return cls.make(order, [int(c * den) for c in fr], den)

    @classmethod
    def zero(cls, order: int) -> "CycloElem":
        return cls(order, (0,) * euler_phi(order), 1)

    @classmethod
    def one(cls, order: int) -> "CycloElem":
        return cls.scalar(order, 1)

    @classmethod
    def scalar(cls, order: int, q: Fraction | int) -> "CycloElem":
        q = Fraction(q)
        num = [0] * euler_phi(order)
        num[0] = q.numerator
        return cls(order, tuple(num), q.denominator) if q else cls.zero(order)

    @property
    def coeffs(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(c, self.den) for c in self.num)

    @property
    def degree(self) -> int:
        return len(self.num)

    def is_zero(self) -> bool:
        return not any(self.num)

    def __bool__(self) -> bool:
        return any(self.num)

    def _coerce(self, other) -> "CycloElem":
        if isinstance(other, CycloElem):
            if other.order != self.order:
                raise ValueError(f"field mismatch: Q(zeta_{self.order}) vs Q(zeta_{other.order})")
            return other
        if isinstance(other, (int, Fraction)):
            return CycloElem.scalar(self.order, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if self.den == other.den:
            return CycloElem.make(self.order, (a + b for a, b in zip(self.num, other.num)), self.den)
        return CycloElem.make(
            self.order,
            (a * other.den + b * self.den for a, b in zip(self.num, other.num)),
            self.den * other.den,
        )

    __radd__ = __add__

    def __neg__(self) -> "CycloElem":
        return CycloElem(self.order, tuple(-c for c in self.num), self.den)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            q = Fraction(other)
            return CycloElem.make(self.order, (c * q.numerator for c in self.num), self.den * q.denominator)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        deg = len(self.num)
        prod = [0] * (2 * deg - 1)
        for i, a in enumerate(self.num):
            if a:
                for j, b in enumerate(other.num):
                    if b:
                        prod[i + j] += a * b
        out = prod[:deg]
        table = _reduction_table(self.order)
        for k in range(deg, 2 * deg - 1):
            c = prod[k]
            if c:
                row = table[k]
                for j in range(deg):
                    out[j] += c * row[j]
        return CycloElem.make(self.order, out, self.den * other.den)

    __rmul__ = __mul__

    def inverse(self) -> "CycloElem":
        """Exact inverse via the extended Euclidean algorithm in Q[x]."""
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero in cyclotomic field")
        modulus = [Fraction(c) for c in cyclotomic_poly(self.order)]
        a = [Fraction(c) for c in self.num]
        while a and a[-1] == 0:
            a.pop()
        # invariants: s*self == r0 and t*self == r1 (mod Phi)
        r0, r1 = modulus, a
        s0: list[Fraction] = []
        s1: list[Fraction] = [Fraction(1)]
        while len(r1) > 1:
            q, r = _frac_divmod(r0, r1)
            r0, r1 = r1, r
            s0, s1 = s1, _frac_sub(s0, _frac_mul(q, s1))
        inv_c = 1 / r1[0]
        coeffs = [c * inv_c for c in s1]
        coeffs += [Fraction(0)] * (len(self.num) - len(coeffs))
        return CycloElem.from_rationals(self.order, coeffs[: len(self.num)]) * Fraction(self.den)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise ZeroDivisionError("division by zero")
            return self * (1 / Fraction(other))
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, k: int) -> "CycloElem":
        if k < 0:
            return self.inverse() ** (-k)
        result = CycloElem.one(self.order)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other) -> bool:
        if isinstance(other, CycloElem):
            return self.order == other.order and self.num == other.num and self.den == other.den
        if isinstance(other, (int, Fraction)):
            return self == CycloElem.scalar(self.order, other)
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.order, self.num, self.den))

    def __repr__(self) -> str:
        terms = []
        for k, c in enumerate(self.coeffs):
            if c:
                terms.append(f"{c}" if k == 0 else f"{c}*z^{k}")
        return f"CycloElem[{self.order}]({' + '.join(terms) or '0'})"

    # serialization: {"order": n, "coeffs": ["num/den", ...]}
    def to_json(self) -> dict:
        return {"order": self.order, "coeffs": [str(c) for c in self.coeffs]}

    @classmethod
    def from_json(cls, data: dict) -> "CycloElem":
        return cls.from_rationals(int(data["order"]), [Fraction(c) for c in data["coeffs"]])

    def dumps(self) -> str:
        return json.dumps(self.to_json(), separators=(",", ":"))


def _frac_mul(a: list[Fraction], b: list[Fraction]) -> list[Fraction]:
    if not a or not b:
        return []
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def _frac_sub(a: list[Fraction], b: list[Fraction]) -> list[Fraction]:
    n = max(len(a), len(b))
    out = [(a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0) for i in range(n)]
    while out and out[-1] == 0:
        out.pop()
    return out


def _frac_divmod(a: list[Fraction], b: list[Fraction]) -> tuple[list[Fraction], list[Fraction]]:
    rem = list(a)
    db = len(b) - 1
    if len(rem) - 1 < db:
        return [], rem
    quot = [Fraction(0)] * (len(rem) - db)
    lead = b[-1]
    for k in range(len(rem) - 1, db - 1, -1):
        c = rem[k] / lead
        if c:
            quot[k - db] = c
            for j in range(db + 1):
                rem[k - db + j] -= c * b[j]
    rem = rem[:db]
    while rem and rem[-1] == 0:
        rem.pop()
    return quot, rem


def root_power(d: int, k: int) -> CycloElem:
    """zeta_{2d}^k, with k taken modulo 2d."""
    if d < 1:
        raise ValueError("d must be positive")
    n = 2 * d
    return CycloElem(n, _root_powers(n)[k % n], 1)


@lru_cache(maxsize=4096)
def power_sum(d: int, exponents: tuple[int, ...], e: int) -> CycloElem:
    """Sum of zeta_{2d}^(u*e) over u in ``exponents``."""
    n = 2 * d
    table = _root_powers(n)
    acc = [0] * euler_phi(n)
    for u in exponents:
        row = table[(u * e) % n]
        for j, c in enumerate(row):
            acc[j] += c
    return CycloElem(n, tuple(acc), 1)


# --------------------------------------------------------------------------
# prime fields


@dataclass(frozen=True)
class PrimeField:
    """F_p together with a fixed element ``w`` of multiplicative order ``order``."""

    p: int
    w: int
    order: int

    def __post_init__(self):
        if (self.p - 1) % self.order:
            raise ValueError(f"p={self.p} is not 1 mod {self.order}")
        if pow(self.w, self.order, self.p) != 1:
            raise ValueError("w^order != 1")
        for q in factorint(self.order):
            if pow(self.w, self.order // q, self.p) == 1:
                raise ValueError("w does not have exact order")

    @classmethod
    def for_prime(cls, p: int, order: int) -> "PrimeField":
        if not isprime(p) or (p - 1) % order:
            raise ValueError(f"{p} is not a prime = 1 mod {order}")
        cofactor = (p - 1) // order
        qs = list(factorint(order))
        for a in range(2, p):
            w = pow(a, cofactor, p)
            if all(pow(w, order // q, p) != 1 for q in qs):
                return cls(p, w, order)
        raise ArithmeticError("no element of the requested order")  # pragma: no cover

    @property
    def root_table(self) -> tuple[int, ...]:
        return _prime_root_table(self.p, self.w, self.order)


@lru_cache(maxsize=None)
def _prime_root_table(p: int, w: int, order: int) -> tuple[int, ...]:
    deg = euler_phi(order)
    return tuple(pow(w, k, p) for k in range(deg))


@lru_cache(maxsize=None)
def _prime_sequence(order: int, count: int, start: int) -> tuple[int, ...]:
    out = []
    # smallest candidate > start with candidate = 1 (mod order)
    cand = start + 1 + ((1 - (start + 1)) % order)
    while len(out) < count:
        if isprime(cand):
            out.append(cand)
        cand += order
    return tuple(out)


def prime_fields(order: int, count: int = 2, start: int = 2**30) -> list[PrimeField]:
    """Deterministic sequence of prime fields p = 1 (mod order), p > ``start``.

    The default window keeps p < 2^31 so products of two residues fit in int64.
    """
    return [PrimeField.for_prime(p, order) for p in _prime_sequence(order, count, start)]


def reduce_mod_prime(a: CycloElem, F: PrimeField) -> int:
    """Image of ``a`` under zeta -> F.w."""
    if a.order != F.order:
        raise ValueError("field order mismatch")
    p = F.p
    if a.den % p == 0:
        raise BadPrimeError(f"denominator {a.den} vanishes mod {p}")
    acc = 0
    for c, wk in zip(a.num, F.root_table):
        if c:
            acc += c * wk
    return acc * pow(a.den, -1, p) % p
