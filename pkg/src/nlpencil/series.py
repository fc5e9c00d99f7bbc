"""Truncated multivariate power series and Taylor expansions of line periods.

A ``TruncatedSeries`` lives in R[[t_v : v in vars]] / M^{N+1} where R is a
coefficient ring (exact Q(zeta_{2d}) or a prime field F_p reached through
zeta -> w).  Keys are dense exponent tuples aligned with ``vars``.

For a line x0 = zeta^u x1, x2 = zeta^v x3 on the Fermat surface, deformed
inside x0^d + ... + x3^d - sum_j t_j x^j = 0, the period of the form with
numerator x^beta (degree d k - 4) expands as

    sum_a  1/a!  zeta^{u e0} zeta^{v e2}  prod_i ({(g_i + 1)/d})_{[(g_i + 1)/d]}  t^a

with g = beta + a*, a* = sum_alpha a_alpha alpha, e0, e2 the residues of
g0 + 1, g2 + 1 in [0, d-1], and the sum restricted to multi-indices with

    {(g0 + 1)/d} + {(g1 + 1)/d} = 1 = {(g2 + 1)/d} + {(g3 + 1)/d}.

The common factor -d^2 (k-1)! / (2 pi i) is dropped.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations_with_replacement
from math import factorial
from typing import Any, Iterator, Mapping, Sequence

from .combinat import ExpVec, frac_int_parts, pochhammer
from .cycles import CICycle, CycleCombo, period_table
from .cyclo import CycloElem, PrimeField, reduce_mod_prime

__all__ = [
    "ExactDomain",
    "ModularDomain",
    "TruncatedSeries",
    "FormSpec",
    "VariableMismatchError",
    "contributing_indices",
    "taylor_period",
    "combo_taylor",
    "taylor_system",
]

REDUCED = "reduced"
RAW = "raw"


class VariableMismatchError(ValueError):
    """Two series over different variable lists were combined."""


# --------------------------------------------------------------------------
# coefficient rings


@dataclass(frozen=True)
class ExactDomain:
    """Q(zeta_n) with CycloElem coefficients."""

    order: int

    @property
    def zero(self) -> CycloElem:
        return CycloElem.zero(self.order)

    @property
    def one(self) -> CycloElem:
        return CycloElem.one(self.order)

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def mul(self, a, b):
        return a * b

    def neg(self, a):
        return -a

    def inv(self, a):
        return a.inverse()

    def is_zero(self, a) -> bool:
        return not a

    def convert(self, x) -> CycloElem:
        if isinstance(x, CycloElem):
            if x.order != self.order:
                raise ValueError(f"element of Q(zeta_{x.order}) in Q(zeta_{self.order}) series")
            return x
        return CycloElem.scalar(self.order, Fraction(x))

    def encode(self, a) -> list[str]:
        return a.to_json()["coeffs"]

    def decode(self, raw) -> CycloElem:
        return CycloElem.from_rationals(self.order, [Fraction(x) for x in raw])

    def describe(self) -> dict:
        return {"kind": "exact", "order": self.order}


@dataclass(frozen=True)
class ModularDomain:
    """F_p with zeta_n mapped to ``field.w``; coefficients are ints in [0, p)."""

    field: PrimeField

    @property
    def order(self) -> int:
        return self.field.order

    @property
    def p(self) -> int:
        return self.field.p

    zero = 0
    one = 1

    def add(self, a, b):
        return (a + b) % self.field.p

    def sub(self, a, b):
        return (a - b) % self.field.p

    def mul(self, a, b):
        return a * b % self.field.p

    def neg(self, a):
        return -a % self.field.p

    def inv(self, a):
        if a % self.field.p == 0:
            raise ZeroDivisionError("inverse of 0 mod p")
        return pow(a, -1, self.field.p)

    def is_zero(self, a) -> bool:
        return a % self.field.p == 0

    def convert(self, x) -> int:
        p = self.field.p
        if isinstance(x, CycloElem):
            return reduce_mod_prime(x, self.field)
        q = Fraction(x)
        return q.numerator * pow(q.denominator, -1, p) % p

    def encode(self, a) -> int:
        return int(a)

    def decode(self, raw) -> int:
        return int(raw) % self.field.p

    def describe(self) -> dict:
        return {"kind": "modular", "p": self.field.p, "w": self.field.w, "order": self.field.order}


Domain = ExactDomain | ModularDomain


def domain_from_json(data: Mapping[str, Any]) -> Domain:
    if data["kind"] == "exact":
        return ExactDomain(int(data["order"]))
    return ModularDomain(PrimeField(int(data["p"]), int(data["w"]), int(data["order"])))


# --------------------------------------------------------------------------
# the series type


def _add_into(acc: dict, key, c, dom) -> None:
    if key in acc:
        s = dom.add(acc[key], c)
        if dom.is_zero(s):
            del acc[key]
        else:
            acc[key] = s
    elif not dom.is_zero(c):
        acc[key] = c


class TruncatedSeries:
    """Sparse element of R[[vars]] / M^{order+1}.  Immutable by convention."""

    __slots__ = ("vars", "order", "terms", "domain")

    def __init__(self, vars: Sequence, order: int, terms: Mapping[tuple[int, ...], Any], domain: Domain):
        if order < 0:
            raise ValueError("truncation order must be non-negative")
        vars = tuple(vars)
        n = len(vars)
        clean: dict[tuple[int, ...], Any] = {}
        for key, c in terms.items():
            key = tuple(int(x) for x in key)
            if len(key) != n or min(key, default=0) < 0:
                raise ValueError(f"bad multi-degree {key} for {n} variables")
            if sum(key) > order:
                raise ValueError(f"term of degree {sum(key)} exceeds order {order}")
            c = domain.convert(c)
            if not domain.is_zero(c):
                clean[key] = c
        self._set(vars, order, clean, domain)

    def _set(self, vars, order, terms, domain) -> None:
        self.vars = vars
        self.order = order
        self.terms = terms
        self.domain = domain

    @classmethod
    def _raw(cls, vars, order, terms, domain) -> "TruncatedSeries":
        # trusted constructor: keys valid, no zero coefficients
        obj = cls.__new__(cls)
        obj._set(vars, order, terms, domain)
        return obj

    # ---- constructors

    @classmethod
    def zero(cls, vars: Sequence, order: int, domain: Domain) -> "TruncatedSeries":
        return cls._raw(tuple(vars), order, {}, domain)

    @classmethod
    def constant(cls, c, vars: Sequence, order: int, domain: Domain) -> "TruncatedSeries":
        vars = tuple(vars)
        return cls(vars, order, {(0,) * len(vars): c}, domain)

    @classmethod
    def variable(cls, k: int, vars: Sequence, order: int, domain: Domain) -> "TruncatedSeries":
        vars = tuple(vars)
        key = tuple(1 if j == k else 0 for j in range(len(vars)))
        return cls(vars, order, {key: domain.one} if order >= 1 else {}, domain)

    # ---- inspection

    @property
    def nvars(self) -> int:
        return len(self.vars)

    def __len__(self) -> int:
        return len(self.terms)

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __iter__(self) -> Iterator[tuple[tuple[int, ...], Any]]:
        return iter(sorted(self.terms.items()))

    def coefficient(self, key: Sequence[int]):
        return self.terms.get(tuple(key), self.domain.zero)

    def constant_term(self):
        return self.coefficient((0,) * self.nvars)

    def linear_part(self) -> list:
        """Coefficients of t_v, in the order of ``vars``."""
        out = []
        for k in range(self.nvars):
            key = tuple(1 if j == k else 0 for j in range(self.nvars))
            out.append(self.coefficient(key))
        return out

    def min_degree(self) -> int | None:
        return min((sum(k) for k in self.terms), default=None)

    def homogeneous(self, deg: int) -> "TruncatedSeries":
        return self._raw(self.vars, self.order, {k: c for k, c in self.terms.items() if sum(k) == deg}, self.domain)

    def __eq__(self, other) -> bool:
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        return (
            self.vars == other.vars
            and self.order == other.order
            and self.domain == other.domain
            and self.terms == other.terms
        )

    def __hash__(self) -> int:
        return hash((self.vars, self.order, frozenset(self.terms.items())))

    def __repr__(self) -> str:
        return f"TruncatedSeries(nvars={self.nvars}, order={self.order}, terms={len(self.terms)})"

    # ---- ring operations

    def _check(self, other: "TruncatedSeries") -> None:
        if self.vars != other.vars:
            raise VariableMismatchError("series are over different variable lists")
        if self.domain != other.domain:
            raise ValueError("series have different coefficient rings")

    def truncate(self, order: int) -> "TruncatedSeries":
        if order > self.order:
            raise ValueError(f"cannot raise truncation order {self.order} to {order}")
        return self._raw(self.vars, order, {k: c for k, c in self.terms.items() if sum(k) <= order}, self.domain)

    def _coerce(self, other) -> "TruncatedSeries":
        if isinstance(other, TruncatedSeries):
            self._check(other)
            return other
        return TruncatedSeries.constant(other, self.vars, self.order, self.domain)

    def __add__(self, other) -> "TruncatedSeries":
        other = self._coerce(other)
        order = min(self.order, other.order)
        acc = {k: c for k, c in self.terms.items() if sum(k) <= order}
        for k, c in other.terms.items():
            if sum(k) <= order:
                _add_into(acc, k, c, self.domain)
        return self._raw(self.vars, order, acc, self.domain)

    __radd__ = __add__

    def __neg__(self) -> "TruncatedSeries":
        neg = self.domain.neg
        return self._raw(self.vars, self.order, {k: neg(c) for k, c in self.terms.items()}, self.domain)

    def __sub__(self, other) -> "TruncatedSeries":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "TruncatedSeries":
        return (-self) + other

    def scale(self, c) -> "TruncatedSeries":
        dom = self.domain
        c = dom.convert(c)
        if dom.is_zero(c):
            return self.zero(self.vars, self.order, dom)
        return self._raw(self.vars, self.order, {k: dom.mul(v, c) for k, v in self.terms.items()}, dom)

    def __mul__(self, other) -> "TruncatedSeries":
        if not isinstance(other, TruncatedSeries):
            return self.scale(other)
        self._check(other)
        return _mul(self, other, min(self.order, other.order))

    def __rmul__(self, other) -> "TruncatedSeries":
        return self.scale(other)

    def __pow__(self, k: int) -> "TruncatedSeries":
        if k < 0:
            raise ValueError("negative powers are not supported")
        out = TruncatedSeries.constant(self.domain.one, self.vars, self.order, self.domain)
        for _ in range(k):
            out = out * self
        return out

    def compose(self, images: Sequence["TruncatedSeries"], order: int | None = None) -> "TruncatedSeries":
        """Substitute t_k -> images[k]; images share vars and have no constant term."""
        return compose_many([self], images, order)[0]

    def substitute(self, mapping: Mapping[int, "TruncatedSeries"], keep: Sequence[int] | None = None,
                   order: int | None = None) -> "TruncatedSeries":
        """Replace the variables in ``mapping`` and keep the others as coordinates.

        The images must be series over ``[vars[j] for j in keep]`` (by default
        every variable not in ``mapping``, in order).
        """
        return substitute_many([self], mapping, keep, order)[0]

    # ---- serialization

    def to_json(self) -> dict:
        return {
            "vars": [list(v) if isinstance(v, tuple) else v for v in self.vars],
            "order": self.order,
            "domain": self.domain.describe(),
            "terms": [[list(k), self.domain.encode(c)] for k, c in sorted(self.terms.items())],
        }

    @classmethod
    def from_json(cls, data: Mapping[str, Any]) -> "TruncatedSeries":
        dom = domain_from_json(data["domain"])
        vars = tuple(ExpVec(*v) if isinstance(v, list) and len(v) == 4 else v for v in data["vars"])
        terms = {tuple(k): dom.decode(c) for k, c in data["terms"]}
        return cls(vars, int(data["order"]), terms, dom)

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


def _mul(f: TruncatedSeries, g: TruncatedSeries, order: int) -> TruncatedSeries:
    dom = f.domain
    a = [(k, sum(k), c) for k, c in f.terms.items()]
    b = [(k, sum(k), c) for k, c in g.terms.items()]
    acc: dict = {}
    mul = dom.mul
    for ka, da, ca in a:
        if da > order:
            continue
        for kb, db, cb in b:
            if da + db > order:
                continue
            _add_into(acc, tuple(x + y for x, y in zip(ka, kb)), mul(ca, cb), dom)
    return TruncatedSeries._raw(f.vars, order, acc, dom)


def compose_many(
    series: Sequence[TruncatedSeries],
    images: Sequence[TruncatedSeries],
    order: int | None = None,
) -> list[TruncatedSeries]:
    """Substitute t_k -> images[k] in every series, sharing the power products."""
    if not images:
        raise ValueError("no images given")
    src = series[0]
    for s in series:
        src._check(s)
        if s.nvars != len(images):
            raise VariableMismatchError("need one image per variable")
    tgt = images[0]
    for im in images:
        tgt._check(im)
        if not tgt.domain.is_zero(im.constant_term()):
            raise ValueError("images must have zero constant term")
    top = min([s.order for s in series] + [im.order for im in images])
    if order is not None:
        top = min(top, order)
    return _compose(series, images, tgt.vars, top, tgt.domain)


def _compose(series, images, new_vars, top, dom) -> list[TruncatedSeries]:
    one_key = (0,) * len(new_vars)
    cache: dict[tuple[int, ...], dict] = {(0,) * len(images): {one_key: dom.one}}
    image_terms = [[(k, sum(k), c) for k, c in im.terms.items() if sum(k) <= top] for im in images]
    mul = dom.mul

    def power(key: tuple[int, ...]) -> dict:
        hit = cache.get(key)
        if hit is not None:
            return hit
        j = max(i for i, e in enumerate(key) if e)
        prev = power(key[:j] + (key[j] - 1,) + key[j + 1:])
        acc: dict = {}
        for ka, ca in prev.items():
            da = sum(ka)
            for kb, db, cb in image_terms[j]:
                if da + db <= top:
                    _add_into(acc, tuple(x + y for x, y in zip(ka, kb)), mul(ca, cb), dom)
        cache[key] = acc
        return acc

    out = []
    for s in series:
        acc: dict = {}
        for key, c in s.terms.items():
            if sum(key) > top:
                continue
            for k, v in power(key).items():
                _add_into(acc, k, mul(c, v), dom)
        out.append(TruncatedSeries._raw(tuple(new_vars), top, acc, dom))
    return out


def substitute_many(
    series: Sequence[TruncatedSeries],
    mapping: Mapping[int, TruncatedSeries],
    keep: Sequence[int] | None = None,
    order: int | None = None,
) -> list[TruncatedSeries]:
    """Partial substitution: mapped variables get series, kept ones stay coordinates.

    Kept variables become monomials, so only the mapped part goes through
    the power cache; the kept part is a plain exponent shift.
    """
    src = series[0]
    n = src.nvars
    for s in series:
        src._check(s)
    keep = [j for j in range(n) if j not in mapping] if keep is None else list(keep)
    if set(keep) & set(mapping) or len(set(keep)) + len(mapping) != n:
        raise ValueError("each variable must be either substituted or kept")
    new_vars = tuple(src.vars[j] for j in keep)
    dom = src.domain
    mapped = sorted(mapping)
    images = [mapping[j] for j in mapped]
    for im in images:
        if im.vars != new_vars:
            raise VariableMismatchError("images must be series in the kept variables")
        if im.domain != dom:
            raise ValueError("images have a different coefficient ring")
        if not dom.is_zero(im.constant_term()):
            raise ValueError("images must have zero constant term")
    top = min([s.order for s in series] + [im.order for im in images])
    if order is not None:
        top = min(top, order)
    one_key = (0,) * len(new_vars)
    cache: dict[tuple[int, ...], list] = {(0,) * len(mapped): [(one_key, 0, dom.one)]}
    image_terms = [[(k, sum(k), c) for k, c in im.terms.items() if sum(k) <= top] for im in images]
    mul = dom.mul

    def power(key: tuple[int, ...]) -> list:
        hit = cache.get(key)
        if hit is not None:
            return hit
        j = max(i for i, e in enumerate(key) if e)
        prev = power(key[:j] + (key[j] - 1,) + key[j + 1:])
        acc: dict = {}
        for ka, da, ca in prev:
            for kb, db, cb in image_terms[j]:
                if da + db <= top:
                    _add_into(acc, tuple(x + y for x, y in zip(ka, kb)), mul(ca, cb), dom)
        res = [(k, sum(k), c) for k, c in acc.items()]
        cache[key] = res
        return res

    out = []
    for s in series:
        acc: dict = {}
        for key, c in s.terms.items():
            mkey = tuple(key[j] for j in mapped)
            shift = tuple(key[j] for j in keep)
            ds = sum(shift)
            if sum(mkey) + ds > top:
                continue
            for k, dk, v in power(mkey):
                if dk + ds <= top:
                    _add_into(acc, tuple(x + y for x, y in zip(k, shift)), mul(c, v), dom)
        out.append(TruncatedSeries._raw(new_vars, top, acc, dom))
    return out


# --------------------------------------------------------------------------
# Taylor expansion of periods


@dataclass(frozen=True)
class FormSpec:
    """Numerator x^beta of a form of pole order k; deg beta = d k - 4."""

    beta: ExpVec
    k: int = 1

    def __post_init__(self):
        object.__setattr__(self, "beta", ExpVec(*self.beta))
        if self.k < 1 or min(self.beta) < 0:
            raise ValueError(f"invalid form {self.beta}, k={self.k}")

    def check(self, d: int) -> None:
        if self.beta.degree != d * self.k - 4:
            raise ValueError(f"deg {self.beta} = {self.beta.degree} != {d}*{self.k} - 4")


def _satisfies(d: int, g: Sequence[int]) -> bool:
    """{(g0+1)/d} + {(g1+1)/d} = 1 and the same for (g2, g3)."""
    for a, b in ((g[0], g[1]), (g[2], g[3])):
        if (a + b + 2) % d or (a + 1) % d == 0:
            return False
    return True


def _reduce_exp(e: int, d: int, window: str) -> int:
    if window == REDUCED:
        return e % d
    if window == RAW:
        return e % (2 * d)
    raise ValueError(f"unknown exponent window {window!r}")


def contributing_indices(
    d: int,
    beta: Sequence[int],
    vars: Sequence[Sequence[int]],
    N: int,
) -> Iterator[tuple[tuple[int, ...], ExpVec]]:
    """Multi-indices a (as sorted tuples of variable positions) of degree <= N
    whose g = beta + a* satisfies the fractional-part constraint.

    Only the class of g0 + g1 mod d matters for the sum condition (the
    second pair follows from the total degree), so multisets are generated
    by degree and filtered on that class before the finer checks.
    """
    beta = ExpVec(*beta)
    vars = [ExpVec(*v) for v in vars]
    need = (-2 - beta[0] - beta[1]) % d
    for deg in range(N + 1):
        for combo in combinations_with_replacement(range(len(vars)), deg):
            s = 0
            for j in combo:
                s += vars[j][0] + vars[j][1]
            if s % d != need:
                continue
            g = beta
            for j in combo:
                g = g + vars[j]
            if _satisfies(d, g):
                yield combo, g


def _multiset_to_key(combo: tuple[int, ...], n: int) -> tuple[int, ...]:
    key = [0] * n
    for j in combo:
        key[j] += 1
    return tuple(key)


def _rational_factor(d: int, combo: tuple[int, ...], g: Sequence[int]) -> Fraction:
    q = Fraction(1)
    run = 1
    for pos in range(1, len(combo) + 1):
        # a! as the product of factorials of repeat counts
        if pos < len(combo) and combo[pos] == combo[pos - 1]:
            run += 1
            continue
        q /= factorial(run)
        run = 1
    for gi in g:
        n, frac = frac_int_parts(Fraction(gi + 1, d))
        q *= pochhammer(frac, n)
    return q


@dataclass(frozen=True)
class _Term:
    key: tuple[int, ...]
    q: Fraction
    e0: int
    e2: int


def _terms(d: int, form: FormSpec, vars, N: int, window: str) -> list[_Term]:
    form.check(d)
    n = len(vars)
    out = []
    for combo, g in contributing_indices(d, form.beta, vars, N):
        out.append(
            _Term(
                _multiset_to_key(combo, n),
                _rational_factor(d, combo, g),
                _reduce_exp(g[0] + 1, d, window),
                _reduce_exp(g[2] + 1, d, window),
            )
        )
    return out


def _combo_d(combo: CycleCombo) -> int:
    if not combo:
        raise ValueError("empty cycle combination has no degree; pass d explicitly")
    return combo.terms[0][1].d


def taylor_system(
    combo: CycleCombo | CICycle,
    forms: Sequence[FormSpec],
    vars: Sequence[Sequence[int]],
    N: int,
    domain: Domain | None = None,
    window: str = REDUCED,
    d: int | None = None,
) -> list[TruncatedSeries]:
    """Period series of ``combo`` against each form, over one variable list."""
    if isinstance(combo, CICycle):
        combo = CycleCombo.of(combo)
    d = d if d is not None else _combo_d(combo)
    vars = tuple(ExpVec(*v) for v in vars)
    for v in vars:
        if v.degree != d or max(v) > d - 2:
            raise ValueError(f"{v} is not a deformation monomial of degree {d}")
    dom = domain or ExactDomain(2 * d)
    exps = range(2 * d) if window == RAW else range(d)
    table = {k: dom.convert(v) for k, v in period_table(combo, d, exps).items()} if combo else {}
    out = []
    for form in forms:
        acc: dict = {}
        for t in _terms(d, form, vars, N, window):
            pv = table.get((t.e0, t.e2), dom.zero)
            if dom.is_zero(pv):
                continue
            _add_into(acc, t.key, dom.mul(pv, dom.convert(t.q)), dom)
        out.append(TruncatedSeries._raw(vars, N, acc, dom))
    return out


def combo_taylor(
    combo: CycleCombo | CICycle,
    form: FormSpec,
    vars: Sequence[Sequence[int]],
    N: int,
    domain: Domain | None = None,
    window: str = REDUCED,
    d: int | None = None,
) -> TruncatedSeries:
    """Period series of a rational combination of cycles (linear in ``combo``)."""
    return taylor_system(combo, [form], vars, N, domain, window, d)[0]


def taylor_period(
    line: CICycle,
    form: FormSpec,
    vars: Sequence[Sequence[int]],
    N: int,
    domain: Domain | None = None,
    window: str = REDUCED,
) -> TruncatedSeries:
    """Period series of the parallel transport of one line."""
    if not line.is_line:
        raise ValueError("taylor_period needs a single line; use combo_taylor for unions")
    return combo_taylor(CycleCombo.of(line), form, vars, N, domain, window)
