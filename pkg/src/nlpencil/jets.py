"""N-jet smoothness of Noether-Lefschetz loci from truncated period series.

The locus V_delta is cut out (in a neighbourhood of the Fermat point) by
the period series g_beta, one per beta in I_{d-4}.  Its N-jet is smooth
when, modulo M^{N+1}, the ideal <g_beta> is generated by c = rank of the
linear parts formal coordinates.  The test:

1. Gauss-Jordan on the generators by their linear parts, scanning
   variables in order; pivot columns are the distinguished variables y,
   the rest are free variables z.  Pivot rows read y_k + (higher order),
   non-pivot rows have no linear part.
2. Solve the pivot rows for y = phi(z) degree by degree (formal implicit
   function theorem).
3. Substitute into the non-pivot rows.  The N-jet is smooth iff these
   residuals vanish modulo degree N + 1; the lowest degree of a nonzero
   residual term is the first failure order.

Row operations are invertible, so the ideal never changes along the way.
"""

from __future__ import annotations

import json
import os
import time
from dataclasses import asdict, dataclass, field
from math import gcd
from pathlib import Path
from typing import Iterable, Sequence

from .combinat import PencilSpec, index_set
from .cycles import CICycle, CycleCombo, build_c1_c2
from .cyclo import prime_fields
from .deform import DeformSpace, TransversalityScanner, default_r_grid, deform_space
from .series import (
    Domain,
    ExactDomain,
    FormSpec,
    ModularDomain,
    TruncatedSeries,
    substitute_many,
    taylor_system,
)
from .tangent import generic_codim, resolve_method

__all__ = [
    "JetIdeal",
    "JetSolution",
    "BackSubstitutionError",
    "linear_codim",
    "solve_jet",
    "n_smooth",
    "first_failure",
    "PencilJets",
    "PairResult",
    "SmoothnessReport",
    "smoothness_scan",
]


class BackSubstitutionError(AssertionError):
    """The solved coordinates do not annihilate the pivot generators."""


@dataclass
class JetIdeal:
    """Generators of the ideal of V_delta, truncated at ``order``."""

    generators: list[TruncatedSeries]
    order: int
    vars: tuple = ()

    def __post_init__(self):
        if not self.generators:
            raise ValueError("a jet ideal needs at least one generator")
        first = self.generators[0]
        self.vars = tuple(self.vars) or first.vars
        for g in self.generators:
            if g.vars != self.vars:
                raise ValueError("generators must share the variable list")
            if g.domain != first.domain:
                raise ValueError("generators must share the coefficient ring")
            if g.order < self.order:
                raise ValueError(f"generator truncated at {g.order} < {self.order}")
            if not g.domain.is_zero(g.constant_term()):
                raise ValueError("generators must vanish at the origin")
        self.generators = [g.truncate(self.order) for g in self.generators]

    @property
    def domain(self) -> Domain:
        return self.generators[0].domain

    @classmethod
    def of_combo(cls, combo: CycleCombo | CICycle, vars: Sequence, N: int,
                 domain: Domain | None = None) -> "JetIdeal":
        """The h20 period series of ``combo`` against the forms x^beta, beta in I_{d-4}."""
        if isinstance(combo, CICycle):
            combo = CycleCombo.of(combo)
        d = combo.terms[0][1].d
        forms = [FormSpec(b) for b in index_set(d, d - 4)]
        return cls(taylor_system(combo, forms, vars, N, domain), N, tuple(vars))

    def to_json(self) -> dict:
        return {"order": self.order, "generators": [g.to_json() for g in self.generators]}

    @classmethod
    def from_json(cls, data: dict) -> "JetIdeal":
        return cls([TruncatedSeries.from_json(g) for g in data["generators"]], int(data["order"]))


def _linear_rows(gens: Sequence[TruncatedSeries]) -> list[list]:
    return [g.linear_part() for g in gens]


def linear_codim(J: JetIdeal) -> int:
    """Rank of the matrix of linear coefficients."""
    if J.order < 1:
        raise ValueError("linear codimension needs order >= 1")
    dom = J.domain
    rows = _linear_rows(J.generators)
    n = len(J.vars)
    used = [False] * len(rows)
    r = 0
    for j in range(n):
        piv = next((i for i, row in enumerate(rows) if not used[i] and not dom.is_zero(row[j])), None)
        if piv is None:
            continue
        used[piv] = True
        r += 1
        inv = dom.inv(rows[piv][j])
        prow = [dom.mul(x, inv) for x in rows[piv]]
        for i, row in enumerate(rows):
            if not used[i] and not dom.is_zero(row[j]):
                f = row[j]
                rows[i] = [dom.sub(a, dom.mul(f, b)) for a, b in zip(row, prow)]
    return r


@dataclass
class JetSolution:
    """Certificate of one implicit-function solve at order ``order``."""

    order: int
    pivots: tuple[tuple[int, int], ...]  # (generator row, variable) pairs
    free: tuple[int, ...]
    phi: list[TruncatedSeries]  # distinguished variables as series in the free ones
    residuals: list[TruncatedSeries]  # non-pivot rows after substitution

    @property
    def codim(self) -> int:
        return len(self.pivots)

    @property
    def first_failure(self) -> int | None:
        degs = [r.min_degree() for r in self.residuals if r]
        return min(degs) if degs else None

    def smooth(self, N: int | None = None) -> bool:
        N = self.order if N is None else N
        if N > self.order:
            raise ValueError(f"solution only valid through order {self.order}")
        f = self.first_failure
        return f is None or f > N


def _reduce_rows(gens: list[TruncatedSeries], n: int) -> tuple[list[TruncatedSeries], list[tuple[int, int]]]:
    """Gauss-Jordan on linear parts; pivot rule: first unused row, column by column."""
    dom = gens[0].domain
    rows = list(gens)
    lin = _linear_rows(rows)
    used = [False] * len(rows)
    pivots: list[tuple[int, int]] = []
    for j in range(n):
        piv = next((i for i in range(len(rows)) if not used[i] and not dom.is_zero(lin[i][j])), None)
        if piv is None:
            continue
        used[piv] = True
        pivots.append((piv, j))
        inv = dom.inv(lin[piv][j])
        rows[piv] = rows[piv].scale(inv)
        lin[piv] = [dom.mul(x, inv) for x in lin[piv]]
        for i in range(len(rows)):
            if i != piv and not dom.is_zero(lin[i][j]):
                f = lin[i][j]
                rows[i] = rows[i] - rows[piv].scale(f)
                lin[i] = [dom.sub(a, dom.mul(f, b)) for a, b in zip(lin[i], lin[piv])]
    return rows, pivots


def solve_jet(J: JetIdeal, N: int | None = None) -> JetSolution:
    """Implicit-function solve of the pivot generators through degree N."""
    N = J.order if N is None else N
    if N > J.order:
        raise ValueError(f"N = {N} exceeds the truncation order {J.order} of the ideal")
    gens = [g.truncate(N) for g in J.generators]
    dom = J.domain
    n = len(J.vars)
    rows, pivots = _reduce_rows(gens, n)
    dist = [j for _, j in pivots]
    free = tuple(j for j in range(n) if j not in set(dist))
    fvars = tuple(J.vars[j] for j in free)
    pivot_rows = [rows[i] for i, _ in pivots]
    others = [rows[i] for i in range(len(rows)) if i not in {i for i, _ in pivots}]

    # rest_k = G_k - y_k
    rest = []
    for (i, j), G in zip(pivots, pivot_rows):
        unit = tuple(1 if m == j else 0 for m in range(n))
        terms = dict(G.terms)
        terms.pop(unit, None)
        rest.append(TruncatedSeries._raw(G.vars, G.order, terms, dom))

    # phi^(1) = minus the free linear part
    phi = []
    for R in rest:
        terms = {}
        for key, c in R.terms.items():
            if sum(key) == 1:
                terms[tuple(key[j] for j in free)] = dom.neg(c)
        phi.append(TruncatedSeries._raw(fvars, N, terms, dom))
    for m in range(2, N + 1):
        vals = substitute_many(rest, dict(zip(dist, phi)), free, order=m) if rest else []
        phi = [TruncatedSeries._raw(fvars, N, (-v).terms, dom) for v in vals]

    allrows = pivot_rows + others
    if dist:
        subbed = substitute_many(allrows, dict(zip(dist, phi)), free, order=N)
    else:
        subbed = [TruncatedSeries._raw(fvars, N, r.terms, dom) for r in allrows]
    for s in subbed[: len(pivot_rows)]:
        if s:
            raise BackSubstitutionError(f"pivot generator leaves a residual of degree {s.min_degree()}")
    return JetSolution(N, tuple(pivots), free, phi, subbed[len(pivot_rows):])


def n_smooth(J: JetIdeal, N: int) -> bool:
    """True iff V^N is the N-jet of a smooth germ of codimension linear_codim(J)."""
    return solve_jet(J, N).smooth(N)


def first_failure(J: JetIdeal, N_max: int | None = None) -> int | None:
    """Least N <= N_max with V^N not smooth, or None."""
    return solve_jet(J, N_max).first_failure


# --------------------------------------------------------------------------
# pencil scans


class PencilJets:
    """Period series of C1 and C2 over one variable list, reused for every (r1, r2)."""

    def __init__(self, C1: CICycle | CycleCombo, C2: CICycle | CycleCombo, vars: Sequence, N: int,
                 domain: Domain):
        self.vars = tuple(vars)
        self.N = N
        self.domain = domain
        J1 = JetIdeal.of_combo(C1, self.vars, N, domain)
        J2 = JetIdeal.of_combo(C2, self.vars, N, domain)
        self.g1, self.g2 = J1.generators, J2.generators

    def ideal(self, r1, r2, N: int | None = None) -> JetIdeal:
        N = self.N if N is None else N
        gens = [a.scale(r1) + b.scale(r2) for a, b in zip(self.g1, self.g2)]
        return JetIdeal([g.truncate(N) for g in gens], N, self.vars)


@dataclass
class PairResult:
    r1: int
    r2: int
    first_failure: int | None  # None: smooth through checked_through
    checked_through: int
    codim: int

    def to_json(self) -> dict:
        return asdict(self)


@dataclass
class SmoothnessReport:
    spec: PencilSpec
    n_max: int
    method: str
    a3: int
    istar_size: int
    nt_pairs: list[tuple[int, int]]
    pairs: list[PairResult] = field(default_factory=list)
    complete: bool = True

    @property
    def column(self) -> int | None:
        """Least first-failure order over the scanned pairs (None: smooth through n_max)."""
        fails = [p.first_failure for p in self.pairs if p.first_failure is not None]
        return min(fails) if fails else None

    def failing_pairs(self, N: int) -> list[tuple[int, int]]:
        return [(p.r1, p.r2) for p in self.pairs if p.first_failure == N]

    def smooth_pairs(self, N: int) -> list[tuple[int, int]]:
        """Pairs whose N-jet was verified smooth."""
        return [
            (p.r1, p.r2)
            for p in self.pairs
            if (p.first_failure is None or p.first_failure > N) and p.checked_through >= N
        ]

    def to_json(self) -> dict:
        return {
            "spec": {"d": self.spec.d, "params": list(self.spec.params)},
            "n_max": self.n_max,
            "method": self.method,
            "a3": self.a3,
            "istar_size": self.istar_size,
            "nt_pairs": [list(p) for p in self.nt_pairs],
            "pairs": [p.to_json() for p in self.pairs],
            "column": self.column,
            "complete": self.complete,
        }

    @classmethod
    def from_json(cls, data: dict) -> "SmoothnessReport":
        sp = data["spec"]
        return cls(
            PencilSpec(sp["d"], *sp["params"]),
            data["n_max"],
            data["method"],
            data["a3"],
            data["istar_size"],
            [tuple(p) for p in data["nt_pairs"]],
            [PairResult(**p) for p in data["pairs"]],
            data.get("complete", True),
        )


def _domains(d: int, method: str) -> list[Domain]:
    if method == "exact":
        return [ExactDomain(2 * d)]
    return [ModularDomain(F) for F in prime_fields(2 * d, 2)]


def _atomic_write(path: Path, payload: dict) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(json.dumps(payload, sort_keys=True))
    os.replace(tmp, path)


def smoothness_scan(
    spec: PencilSpec,
    r_grid: Iterable[tuple[int, int]] | None = None,
    N_max: int = 3,
    ds: DeformSpace | None = None,
    method: str = "auto",
    exhaustive: bool = False,
    nt_pairs: Sequence[tuple[int, int]] | None = None,
    skip_nt: bool = False,
    checkpoint: str | os.PathLike | None = None,
    deadline: float | None = None,
) -> SmoothnessReport:
    """First-failure orders of the jets of r1 C1 + r2 C2 on the reduced space.

    Orders are raised one at a time.  Unless ``exhaustive``, the scan stops
    raising N once some pair has failed, since the column of the spec is then
    fixed; every pair still records the order it was checked through.

    Every grid pair is scanned by default: the I*-restriction keeps the rank
    of every member, so the reduced space is valid for all of them.  NT
    pairs (rank different from a3) are listed in the report and can be
    dropped with ``skip_nt``.  Each pair's linear codimension is checked
    against the rank of its restricted period matrix.

    With ``method="modular"`` each pair is solved over two prime fields and
    the smaller first failure is kept: a nonzero residual mod p is nonzero
    over Q(zeta), so failures are certified and smoothness is a
    high-probability claim.

    ``deadline`` is a ``time.monotonic()`` value; pairs not reached by then
    are left out and the report is marked incomplete.
    """
    d = spec.d
    method = resolve_method(d, method)
    C1, C2 = build_c1_c2(spec)
    ds = ds or deform_space(C1, C2, d, method, spec)
    a3, _, _ = generic_codim(C1, C2, d, method)
    grid = [(r1, r2) for r1, r2 in (default_r_grid() if r_grid is None else r_grid) if gcd(r1, r2) == 1]
    scanner = TransversalityScanner(C1, C2, ds, method, reference=a3)
    if nt_pairs is None:
        nt_pairs = [pr for pr in grid if not scanner.transversal(*pr)]
    nt = set(map(tuple, nt_pairs))
    todo = [pr for pr in grid if not (skip_nt and pr in nt)]

    state: dict[tuple[int, int], PairResult] = {}
    ck_path = Path(checkpoint) if checkpoint else None
    ck_key = {"spec": spec.key, "n_max": N_max, "method": method, "exhaustive": exhaustive, "grid": [list(p) for p in todo]}
    if ck_path and ck_path.exists():
        saved = json.loads(ck_path.read_text())
        if saved.get("key") == json.loads(json.dumps(ck_key)):
            for p in saved["pairs"]:
                state[(p["r1"], p["r2"])] = PairResult(**p)

    jets = [PencilJets(C1, C2, ds.istar, N_max, dom) for dom in _domains(d, method)]

    def check(r1: int, r2: int, N: int) -> tuple[int | None, int]:
        fails, codims = [], []
        for pj in jets:
            J = pj.ideal(r1, r2, N)
            sol = solve_jet(J, N)
            codims.append(sol.codim)
            fails.append(sol.first_failure)
        codim = max(codims)
        # a prime that drops the linear rank is unlucky for this pair; ignore it
        good = [f for f, c in zip(fails, codims) if c == codim]
        found = [f for f in good if f is not None]
        return (min(found) if found else None), codim

    def save() -> None:
        if ck_path:
            _atomic_write(ck_path, {"key": ck_key, "pairs": [state[k].to_json() for k in sorted(state)]})

    out_of_time = False
    for N in range(2, N_max + 1):
        if out_of_time or (not exhaustive and any(p.first_failure is not None for p in state.values())):
            break
        for r1, r2 in todo:
            prev = state.get((r1, r2))
            if prev and (prev.first_failure is not None or prev.checked_through >= N):
                continue
            if deadline is not None and time.monotonic() > deadline:
                out_of_time = True
                break
            f, codim = check(r1, r2, N)
            expected = a3 if (r1, r2) not in nt else scanner.ranks(r1, r2)[1]
            if codim != expected:
                raise AssertionError(f"{spec.key} ({r1},{r2}): linear codim {codim} != period rank {expected}")
            if prev and f is not None and f <= prev.checked_through:
                raise AssertionError(f"{spec.key} ({r1},{r2}): failure at {f} after smooth through {prev.checked_through}")
            state[(r1, r2)] = PairResult(r1, r2, f, N, codim)
            save()

    pairs = [state[pr] for pr in todo if pr in state]
    complete = not out_of_time and len(pairs) == len(todo)
    return SmoothnessReport(spec, N_max, method, a3, len(ds), sorted(nt), pairs, complete=complete)
