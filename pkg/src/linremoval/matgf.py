"""Dense exact linear algebra over GF(q).

Matrices are small (tens of rows and columns), so everything is plain
Python on tuples of canonical integers.  Pivoting takes the first nonzero
entry top to bottom, which keeps reductions deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .gf import FieldSpec


class DimensionError(ValueError):
    pass


@dataclass(frozen=True)
class MatrixGF:
    spec: FieldSpec
    rows: int
    cols: int
    entries: tuple[int, ...]

    def __post_init__(self):
        if len(self.entries) != self.rows * self.cols:
            raise DimensionError(
                f"{len(self.entries)} entries for a {self.rows}x{self.cols} matrix"
            )
        q = self.spec.q
        for e in self.entries:
            if not 0 <= e < q:
                raise ValueError(f"entry {e} is not an element of {self.spec!r}")

    @classmethod
    def from_rows(cls, spec: FieldSpec, rows: Sequence[Sequence[int]], cols: int | None = None):
        rows = [list(r) for r in rows]
        if cols is None:
            cols = len(rows[0]) if rows else 0
        if any(len(r) != cols for r in rows):
            raise DimensionError("ragged rows")
        return cls(spec, len(rows), cols, tuple(int(e) for r in rows for e in r))

    @classmethod
    def zeros(cls, spec: FieldSpec, rows: int, cols: int):
        return cls(spec, rows, cols, (0,) * (rows * cols))

    @classmethod
    def identity(cls, spec: FieldSpec, size: int):
        return cls(spec, size, size, tuple(int(i == j) for i in range(size) for j in range(size)))

    @classmethod
    def from_columns(cls, spec: FieldSpec, columns: Sequence[Sequence[int]], rows: int):
        return cls.from_rows(spec, [[c[r] for c in columns] for r in range(rows)], len(columns))

    def __getitem__(self, idx) -> int:
        r, c = idx
        return self.entries[r * self.cols + c]

    def row(self, r: int) -> tuple[int, ...]:
        return self.entries[r * self.cols:(r + 1) * self.cols]

    def col(self, c: int) -> tuple[int, ...]:
        return self.entries[c::self.cols] if self.cols else ()

    def to_rows(self) -> list[list[int]]:
        return [list(self.row(r)) for r in range(self.rows)]

    def columns(self) -> list[tuple[int, ...]]:
        return [self.col(c) for c in range(self.cols)]

    def transpose(self) -> MatrixGF:
        return MatrixGF.from_rows(self.spec, self.columns(), self.rows)

    def is_zero(self) -> bool:
        return not any(self.entries)

    def submatrix(self, rows=None, cols=None) -> MatrixGF:
        rows = range(self.rows) if rows is None else list(rows)
        cols = range(self.cols) if cols is None else list(cols)
        return MatrixGF.from_rows(self.spec, [[self[r, c] for c in cols] for r in rows], len(cols))

    def __str__(self):
        return "\n".join(" ".join(str(e) for e in self.row(r)) for r in range(self.rows))


def mat_mul(M: MatrixGF, N: MatrixGF) -> MatrixGF:
    if M.spec != N.spec:
        raise ValueError("matrices over different fields")
    if M.cols != N.rows:
        raise DimensionError(f"cannot multiply {M.rows}x{M.cols} by {N.rows}x{N.cols}")
    F = M.spec
    out = []
    ncols = N.columns()
    for r in range(M.rows):
        mr = M.row(r)
        out.append([dot(F, mr, c) for c in ncols])
    return MatrixGF.from_rows(F, out, N.cols)


def mat_vec(M: MatrixGF, v: Sequence[int]) -> list[int]:
    if len(v) != M.cols:
        raise DimensionError(f"vector of length {len(v)} for {M.cols} columns")
    return [dot(M.spec, M.row(r), v) for r in range(M.rows)]


def dot(F: FieldSpec, u: Sequence[int], v: Sequence[int]) -> int:
    acc = 0
    for a, b in zip(u, v):
        if a and b:
            acc = F.add(acc, F.mul(a, b))
    return acc


def _reduce(F: FieldSpec, work: list[list[int]], ncols: int):
    """In-place Gauss-Jordan on a list of rows; returns pivot columns."""
    pivots = []
    r = 0
    nrows = len(work)
    for c in range(ncols):
        if r == nrows:
            break
        piv = next((i for i in range(r, nrows) if work[i][c]), None)
        if piv is None:
            continue
        work[r], work[piv] = work[piv], work[r]
        lead = work[r][c]
        if lead != 1:
            s = F.inv(lead)
            work[r] = [F.mul(s, e) for e in work[r]]
        prow = work[r]
        for i in range(nrows):
            f = work[i][c]
            if i != r and f:
                nf = F.neg(f)
                work[i] = [F.add(e, F.mul(nf, pe)) if pe else e for e, pe in zip(work[i], prow)]
        pivots.append(c)
        r += 1
    return pivots


def rref(M: MatrixGF) -> tuple[MatrixGF, tuple[int, ...], int]:
    """Reduced row echelon form, pivot columns (0-based) and rank."""
    work = M.to_rows()
    pivots = _reduce(M.spec, work, M.cols)
    return MatrixGF.from_rows(M.spec, work, M.cols), tuple(pivots), len(pivots)


def rank(M: MatrixGF) -> int:
    return rref(M)[2]


def rank_of_columns(F: FieldSpec, columns: Sequence[Sequence[int]]) -> int:
    if not columns:
        return 0
    work = [list(c) for c in columns]
    return len(_reduce(F, work, len(work[0])))


def kernel_basis(M: MatrixGF) -> MatrixGF:
    """cols x (cols - rank) matrix whose columns form a basis of {x : Mx = 0}."""
    F = M.spec
    R, pivots, rk = rref(M)
    free = [c for c in range(M.cols) if c not in pivots]
    basis = []
    for f in free:
        v = [0] * M.cols
        v[f] = 1
        for r, pc in enumerate(pivots):
            v[pc] = F.neg(R[r, f])
        basis.append(v)
    return MatrixGF.from_columns(F, basis, M.cols) if basis else MatrixGF.zeros(F, M.cols, 0)


def solve_particular(M: MatrixGF, b: Sequence[int]) -> list[int] | None:
    """Some x with Mx = b, or None when the system is inconsistent."""
    if len(b) != M.rows:
        raise DimensionError(f"right-hand side of length {len(b)} for {M.rows} rows")
    F = M.spec
    work = [list(M.row(r)) + [int(b[r])] for r in range(M.rows)]
    pivots = _reduce(F, work, M.cols + 1)
    if pivots and pivots[-1] == M.cols:
        return None
    x = [0] * M.cols
    for r, pc in enumerate(pivots):
        x[pc] = work[r][M.cols]
    return x


def express_in_basis(F: FieldSpec, basis: Sequence[Sequence[int]], v: Sequence[int]) -> list[int] | None:
    """Coefficients c with sum c_i basis_i = v, or None if v is outside the span."""
    if not basis:
        return [] if not any(v) else None
    B = MatrixGF.from_columns(F, basis, len(v))
    return solve_particular(B, v)


def permute_cols(M: MatrixGF, perm: Sequence[int]) -> MatrixGF:
    """Column c of the result is column perm[c] of M."""
    if sorted(perm) != list(range(M.cols)):
        raise DimensionError("not a permutation of the columns")
    return M.submatrix(cols=perm)


def permute_rows(M: MatrixGF, perm: Sequence[int]) -> MatrixGF:
    if sorted(perm) != list(range(M.rows)):
        raise DimensionError("not a permutation of the rows")
    return M.submatrix(rows=perm)
