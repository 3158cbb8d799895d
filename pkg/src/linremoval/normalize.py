"""Reduce a system Ax = b with membership sets to canonical form.

The canonical form satisfies
  (i)   b = 0,
  (ii)  A = (I_k | B),
  (iii) every two rows of B are linearly independent,
  (iv)  every row of B has at least two nonzero entries,
and additionally has no zero column (a variable occurring in no equation
is dropped and contributes a constant factor |X_j| to every count).

Every step is logged as a record in a Transcript.  Replaying the records
on the original system reproduces the normalized one, solutions of the
normalized system lift back, and element removals pull back to the
original sets.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping, Sequence

from .gf import FieldSpec
from .matgf import MatrixGF, _reduce, mat_vec, rank_of_columns

# -- systems --------------------------------------------------------------


@dataclass(frozen=True)
class LinSystem:
    """Ax = b together with membership sets X_1..X_m (0-based internally)."""

    spec: FieldSpec
    A: MatrixGF
    b: tuple[int, ...]
    sets: tuple[frozenset, ...]

    def __post_init__(self):
        object.__setattr__(self, "b", tuple(int(v) for v in self.b))
        object.__setattr__(self, "sets", tuple(frozenset(int(e) for e in s) for s in self.sets))
        if self.A.spec != self.spec:
            raise ValueError("matrix field differs from system field")
        if len(self.b) != self.A.rows:
            raise ValueError(f"b has length {len(self.b)}, expected {self.A.rows}")
        if len(self.sets) != self.A.cols:
            raise ValueError(f"{len(self.sets)} sets for {self.A.cols} variables")
        q = self.spec.q
        for v in self.b:
            if not 0 <= v < q:
                raise ValueError(f"b entry {v} is not a field element")
        for s in self.sets:
            for e in s:
                if not 0 <= e < q:
                    raise ValueError(f"set element {e} is not a field element")

    @property
    def k(self) -> int:
        return self.A.rows

    @property
    def m(self) -> int:
        return self.A.cols

    def is_solution(self, x: Sequence[int]) -> bool:
        return list(mat_vec(self.A, x)) == list(self.b)

    def with_sets(self, sets) -> LinSystem:
        return replace(self, sets=tuple(frozenset(s) for s in sets))


def _delete(A: MatrixGF, row=None, col=None) -> MatrixGF:
    rows = [r for r in range(A.rows) if r != row]
    cols = [c for c in range(A.cols) if c != col]
    return A.submatrix(rows, cols)


def _scaled(F: FieldSpec, c: int, s: Iterable[int]) -> frozenset:
    return frozenset(F.mul(c, e) for e in s)


# -- transcript records -------------------------------------------------------


@dataclass(frozen=True)
class NoOp:
    def apply(self, s: LinSystem) -> LinSystem:
        return s

    def describe(self) -> str:
        return "noop"


@dataclass(frozen=True)
class RowOps:
    """A <- P A, b <- P b.  P may drop rows (redundant equations)."""

    P: MatrixGF

    def apply(self, s):
        from .matgf import mat_mul

        A = mat_mul(self.P, s.A)
        b = mat_vec(self.P, s.b)
        return replace(s, A=A, b=tuple(b))

    def describe(self):
        rows = "; ".join(" ".join(map(str, self.P.row(r))) for r in range(self.P.rows))
        return f"rowops {self.P.rows}x{self.P.cols} [{rows}]"


@dataclass(frozen=True)
class ColPermute:
    """New variable c is old variable perm[c]."""

    perm: tuple[int, ...]

    def apply(self, s):
        from .matgf import permute_cols

        return replace(
            s, A=permute_cols(s.A, self.perm), sets=tuple(s.sets[p] for p in self.perm)
        )

    def describe(self):
        return "colpermute " + " ".join(str(p + 1) for p in self.perm)


@dataclass(frozen=True)
class ShiftSet:
    """Substitute x_i = x'_i + c: X_i <- X_i - c, b <- b - c A^i."""

    i: int
    c: int

    def apply(self, s):
        F = s.spec
        col = s.A.col(self.i)
        b = tuple(F.sub(bv, F.mul(self.c, a)) for bv, a in zip(s.b, col))
        sets = list(s.sets)
        sets[self.i] = frozenset(F.sub(e, self.c) for e in sets[self.i])
        return replace(s, b=b, sets=tuple(sets))

    def describe(self):
        return f"shift {self.i + 1} {self.c}"


@dataclass(frozen=True)
class MergeVariables:
    """On solutions x_eliminated = scalar * x_survivor.

    The eliminated variable is a pivot of the (I | B) form; its equation and
    column are deleted and the survivor's set becomes
    X_s & {scalar^-1 * y : y in X_e}.
    """

    survivor: int
    eliminated: int
    scalar: int

    def apply(self, s):
        F = s.spec
        e, sv = self.eliminated, self.survivor
        sets = list(s.sets)
        sets[sv] = sets[sv] & _scaled(F, F.inv(self.scalar), sets[e])
        del sets[e]
        b = list(s.b)
        del b[e]
        return replace(s, A=_delete(s.A, row=e, col=e), b=tuple(b), sets=tuple(sets))

    def describe(self):
        return f"merge {self.survivor + 1} {self.eliminated + 1} {self.scalar}"


@dataclass(frozen=True)
class ForceZero:
    """Equation i reads x_i = 0; the equation and variable are removed."""

    i: int

    def apply(self, s):
        sets = list(s.sets)
        del sets[self.i]
        b = list(s.b)
        del b[self.i]
        return replace(s, A=_delete(s.A, row=self.i, col=self.i), b=tuple(b), sets=tuple(sets))

    def describe(self):
        return f"forcezero {self.i + 1}"


@dataclass(frozen=True)
class DropVariable:
    """Variable j occurs in no equation; it is split off as a free factor."""

    j: int

    def apply(self, s):
        sets = list(s.sets)
        del sets[self.j]
        return replace(s, A=_delete(s.A, col=self.j), sets=tuple(sets))

    def describe(self):
        return f"drop {self.j + 1}"


@dataclass
class Transcript:
    spec: FieldSpec
    m: int
    records: list = field(default_factory=list)

    def replay(self, s: LinSystem) -> LinSystem:
        for rec in self.records:
            s = rec.apply(s)
        return s

    def extend(self, recs) -> None:
        self.records.extend(recs)

    def describe(self) -> str:
        return "\n".join(r.describe() for r in self.records)

    def track(self):
        """Follow variable identities through the records.

        Returns (current, gone): current[v] = (original index, shift) for each
        surviving variable; gone[record index] = (original index, shift) for
        each variable removed by ForceZero or DropVariable.
        """
        F = self.spec
        cur = [(j, 0) for j in range(self.m)]
        gone = {}
        for idx, rec in enumerate(self.records):
            if isinstance(rec, ColPermute):
                cur = [cur[p] for p in rec.perm]
            elif isinstance(rec, ShiftSet):
                o, c = cur[rec.i]
                cur[rec.i] = (o, F.add(c, rec.c))
            elif isinstance(rec, MergeVariables):
                del cur[rec.eliminated]
            elif isinstance(rec, ForceZero):
                gone[idx] = cur.pop(rec.i)
            elif isinstance(rec, DropVariable):
                gone[idx] = cur.pop(rec.j)
        return cur, gone

    def lift(self, y: Sequence[int], free_values: Sequence[int] = ()) -> list[int]:
        """Map a normalized solution back to the original variables.

        free_values supplies the dropped free variables in record order.
        """
        F = self.spec
        x = list(y)
        drops = [i for i, r in enumerate(self.records) if isinstance(r, DropVariable)]
        if len(free_values) != len(drops):
            raise ValueError(f"need {len(drops)} free values, got {len(free_values)}")
        free_of = dict(zip(drops, free_values))
        for idx in range(len(self.records) - 1, -1, -1):
            rec = self.records[idx]
            if isinstance(rec, ColPermute):
                old = [0] * len(x)
                for c, p in enumerate(rec.perm):
                    old[p] = x[c]
                x = old
            elif isinstance(rec, ShiftSet):
                x[rec.i] = F.add(x[rec.i], rec.c)
            elif isinstance(rec, MergeVariables):
                # survivor index refers to the list before deletion
                sv = rec.survivor if rec.survivor < rec.eliminated else rec.survivor - 1
                x.insert(rec.eliminated, F.mul(rec.scalar, x[sv]))
            elif isinstance(rec, ForceZero):
                x.insert(rec.i, 0)
            elif isinstance(rec, DropVariable):
                x.insert(rec.j, free_of[idx])
        return x


# -- outcomes -----------------------------------------------------------------


@dataclass
class NormalizedSystem:
    system: LinSystem
    transcript: Transcript
    free_sets: list = field(default_factory=list)  # sets of dropped free variables

    @property
    def k(self):
        return self.system.k

    @property
    def m(self):
        return self.system.m

    @property
    def free_factor(self) -> int:
        return math.prod(len(s) for s in self.free_sets)


@dataclass
class Degenerate:
    """A system settled without hypergraph machinery.

    kind is "solution-free" (no solutions at all) or "unconstrained" (every
    equation eliminated: the solutions are the product of the remaining sets).
    """

    kind: str
    reason: str
    transcript: Transcript
    system: LinSystem | None = None
    free_sets: list = field(default_factory=list)


class NormalizationError(RuntimeError):
    pass


# -- predicates ----------------------------------------------------------------


def canonical_violations(s: LinSystem) -> list[str]:
    """Which of the canonical-form properties fail (empty list when canonical)."""
    F, A, k, m = s.spec, s.A, s.k, s.m
    out = []
    if any(s.b):
        out.append("(i) b != 0")
    if A.submatrix(cols=range(k)) != MatrixGF.identity(F, k):
        out.append("(ii) A is not (I_k | B)")
        return out
    rows = [A.row(r)[k:] for r in range(k)]
    for i, j in itertools.combinations(range(k), 2):
        if rank_of_columns(F, [rows[i], rows[j]]) < 2:
            out.append(f"(iii) rows {i + 1} and {j + 1} of B are dependent")
    for i, r in enumerate(rows):
        if sum(1 for e in r if e) < 2:
            out.append(f"(iv) row {i + 1} of B has fewer than two nonzero entries")
    if k and m < k + 2:
        out.append("m < k + 2")
    for j in range(m):
        if not any(A.col(j)):
            out.append(f"variable {j + 1} occurs in no equation")
    return out


def is_canonical(s: LinSystem) -> bool:
    return s.k >= 1 and not canonical_violations(s)


# -- stages -------------------------------------------------------------------


def ensure_full_rank(s: LinSystem):
    """Drop redundant equations.  Returns (system, records) or None if 0 = c != 0."""
    F, k, m = s.spec, s.k, s.m
    work = [list(s.A.row(r)) + [s.b[r]] + [int(r == t) for t in range(k)] for r in range(k)]
    pivots = _reduce(F, work, m + 1)
    if pivots and pivots[-1] == m:
        return None
    if len(pivots) == k:
        return s, []
    P = MatrixGF.from_rows(F, [row[m + 1:] for row in work[: len(pivots)]], k)
    rec = RowOps(P)
    return rec.apply(s), [rec]


def to_identity_form(s: LinSystem):
    """Permute pivot columns to the front and row-reduce to (I_k | B)."""
    F, k, m = s.spec, s.k, s.m
    work = [list(s.A.row(r)) + [int(r == t) for t in range(k)] for r in range(k)]
    pivots = _reduce(F, work, m)
    if len(pivots) != k:
        raise NormalizationError("to_identity_form needs full row rank")
    recs = []
    P = MatrixGF.from_rows(F, [row[m:] for row in work], k)
    if P != MatrixGF.identity(F, k):
        recs.append(RowOps(P))
    perm = tuple(list(pivots) + [c for c in range(m) if c not in pivots])
    if perm != tuple(range(m)):
        recs.append(ColPermute(perm))
    for rec in recs:
        s = rec.apply(s)
    return s, recs


def homogenize(s: LinSystem):
    recs = [ShiftSet(i, c) for i, c in enumerate(s.b) if c]
    for rec in recs:
        s = rec.apply(s)
    return s, recs


def _b_row(s: LinSystem, i: int) -> tuple[int, ...]:
    return s.A.row(i)[s.k:]


def eliminate_thin_rows(s: LinSystem):
    """Eliminate equations whose B-row has at most one nonzero entry.

    Returns (system, records, solution_free).
    """
    F = s.spec
    recs = []
    while True:
        thin = None
        for i in range(s.k):
            nz = [(j, c) for j, c in enumerate(_b_row(s, i)) if c]
            if len(nz) <= 1:
                thin = (i, nz)
                break
        if thin is None:
            return s, recs, False
        i, nz = thin
        if not nz:
            if 0 not in s.sets[i]:
                return s, recs, True
            rec = ForceZero(i)
        else:
            j, c = nz[0]
            # x_i + c x_j = 0
            rec = MergeVariables(survivor=s.k + j, eliminated=i, scalar=F.neg(c))
        s = rec.apply(s)
        recs.append(rec)


def _proportional(F: FieldSpec, u, v):
    """lambda with v = lambda * u, or None (u nonzero)."""
    t = next(t for t, e in enumerate(u) if e)
    lam = F.div(v[t], u[t])
    if lam and all(F.mul(lam, a) == bv for a, bv in zip(u, v)):
        return lam
    return None


def merge_proportional_rows(s: LinSystem):
    """Merge the pivot variables of proportional B-rows, smallest pair first."""
    F = s.spec
    recs = []
    while True:
        found = None
        for i, j in itertools.combinations(range(s.k), 2):
            bi, bj = _b_row(s, i), _b_row(s, j)
            if not any(bi) or not any(bj):
                continue
            lam = _proportional(F, bi, bj)
            if lam is not None:
                found = (i, j, lam)
                break
        if found is None:
            return s, recs
        i, j, lam = found
        # x_i = -B_i y and x_j = -B_j y = lam x_i
        rec = MergeVariables(survivor=i, eliminated=j, scalar=lam)
        s = rec.apply(s)
        recs.append(rec)


def drop_free_variables(s: LinSystem):
    recs = []
    free_sets = []
    j = s.k
    while j < s.m:
        if not any(s.A.col(j)):
            free_sets.append(s.sets[j])
            rec = DropVariable(j)
            s = rec.apply(s)
            recs.append(rec)
        else:
            j += 1
    return s, recs, free_sets


def normalize(s: LinSystem):
    """Run every reduction to a fixed point.  Returns NormalizedSystem or Degenerate."""
    t = Transcript(s.spec, s.m)
    full = ensure_full_rank(s)
    if full is None:
        return Degenerate("solution-free", "inconsistent equations", t)
    s, recs = full
    t.extend(recs)
    s, recs = to_identity_form(s)
    t.extend(recs)
    s, recs = homogenize(s)
    t.extend(recs)

    free_sets = []
    for _ in range(s.m + 1):
        s, recs, dead = eliminate_thin_rows(s)
        t.extend(recs)
        if dead:
            return Degenerate("solution-free", "forced zero outside its set", t, s, free_sets)
        changed = bool(recs)
        s, recs = merge_proportional_rows(s)
        t.extend(recs)
        changed |= bool(recs)
        if s.k == 0:
            break
        s, recs, fs = drop_free_variables(s)
        t.extend(recs)
        free_sets.extend(fs)
        changed |= bool(recs)
        if not changed:
            break
    else:  # pragma: no cover - every change removes a variable
        raise NormalizationError("reductions did not reach a fixed point")

    if any(not fs for fs in free_sets):
        return Degenerate("solution-free", "empty set on a free variable", t, s, free_sets)
    if s.k == 0:
        return Degenerate("unconstrained", "all equations eliminated", t, s, free_sets)
    if not t.records:
        t.records.append(NoOp())
    bad = canonical_violations(s)
    if bad:
        raise NormalizationError("; ".join(bad))
    return NormalizedSystem(s, t, free_sets)


def apply_column_permutation(ns: NormalizedSystem, perm: Sequence[int]) -> NormalizedSystem:
    """Permute variables of a normalized system, logging the permutation."""
    perm = tuple(perm)
    if perm == tuple(range(ns.m)):
        return ns
    rec = ColPermute(perm)
    t = Transcript(ns.transcript.spec, ns.transcript.m, list(ns.transcript.records) + [rec])
    return NormalizedSystem(rec.apply(ns.system), t, list(ns.free_sets))


def pull_back_removals(
    t: Transcript,
    removals: Mapping[int, Iterable[int]],
    gone_removals: Mapping[int, Iterable[int]] | None = None,
) -> dict[int, list[int]]:
    """Translate element removals on the normalized sets to the original sets.

    removals maps normalized variable index -> elements; gone_removals maps the
    transcript index of a ForceZero/DropVariable record -> elements of that
    variable's set at drop time.  Returns original index -> sorted elements.
    """
    F = t.spec
    cur, gone = t.track()
    out: dict[int, set] = {}
    for v, elems in removals.items():
        o, c = cur[v]
        out.setdefault(o, set()).update(F.add(e, c) for e in elems)
    for idx, elems in (gone_removals or {}).items():
        o, c = gone[idx]
        out.setdefault(o, set()).update(F.add(e, c) for e in elems)
    return {o: sorted(es) for o, es in sorted(out.items()) if es}


def apply_removals(s: LinSystem, removals: Mapping[int, Iterable[int]]) -> LinSystem:
    sets = [set(x) for x in s.sets]
    for i, elems in removals.items():
        sets[i].difference_update(elems)
    return s.with_sets(sets)
