"""Kernel certificate for a normalized matrix A = (I_k | B).

Builds the sequence of column bases T_0..T_m by single exchanges, the
exchange bijection g, the matrix C whose columns are kernel vectors of A,
the staircase region R holding every nonzero of C, its row slices S_i and
the rank witnesses S'_i.  Index sets (T, g, S, S') are 1-based; matrices
are 0-based.

A certificate is valid when
  1. AC = 0,
  2. rank(C) = m - k,
  3. supp(C_i) is a nonempty subset of S_i, |S_i| = k + 1, S_i distinct,
  4. the columns of C outside S'_i (|S'_i| = k, S'_i in S_i) have rank m - k.
verify_certificate checks these without trusting the construction.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .gf import FieldSpec
from .matgf import MatrixGF, express_in_basis, mat_mul, permute_cols, rank, rank_of_columns


class CertificateError(RuntimeError):
    """Internal-consistency failure while building a certificate."""


@dataclass(frozen=True)
class BasisTrace:
    k: int
    m: int
    T: tuple[tuple[int, ...], ...]  # T[i] sorted, i = 0..m
    g: tuple[int, ...]  # g[i - 1] = g(i)
    colperm: tuple[int, ...]  # 0-based: new column c is old column colperm[c]

    def ginv(self, v: int) -> int:
        return self.g.index(v) + 1


@dataclass(frozen=True)
class KernelCertificate:
    spec: FieldSpec
    C: MatrixGF
    trace: BasisTrace
    S: tuple[tuple[int, ...], ...]
    Sprime: tuple[tuple[int, ...], ...]

    @property
    def k(self):
        return self.trace.k

    @property
    def m(self):
        return self.trace.m


def _column(A: MatrixGF, j: int):
    return A.col(j - 1)


def _expand(A: MatrixGF, basis_idx, j: int) -> dict[int, int]:
    """Coefficients of A^j over the columns indexed by basis_idx (1-based)."""
    basis_idx = sorted(basis_idx)
    coef = express_in_basis(A.spec, [_column(A, r) for r in basis_idx], _column(A, j))
    if coef is None:
        raise CertificateError(f"column {j} is outside the span of columns {basis_idx}")
    return dict(zip(basis_idx, coef))


def build_bases(A: MatrixGF) -> tuple[BasisTrace, MatrixGF]:
    """Run the exchange construction; returns the trace and the permuted A."""
    k, m = A.rows, A.cols
    if k < 1 or m < k + 2:
        raise CertificateError(f"need 1 <= k and m >= k + 2, got k={k}, m={m}")
    perm = list(range(m))
    T: list = [None] * (m + 1)
    g = [0] * (m + 1)
    T[k] = frozenset(range(1, k + 1))

    for i in range(k, m):
        best = None
        for j in range(i + 1, m + 1):
            coef = _expand(A, T[i], j)
            nz = [r for r in sorted(T[i]) if coef[r]]
            if nz and (best is None or nz[0] < best[0]):
                best = (nz[0], j)
        if best is None:
            raise CertificateError(f"columns {i + 1}..{m} are all zero")
        r, j = best
        if j != i + 1:
            swap = list(range(m))
            swap[i], swap[j - 1] = swap[j - 1], swap[i]
            A = permute_cols(A, swap)
            perm[i], perm[j - 1] = perm[j - 1], perm[i]
        g[i + 1] = r
        T[i + 1] = (T[i] - {r}) | {i + 1}

    T[0] = T[m]
    Tk_first = T[k]
    for i in range(0, k):
        coef = _expand(A, T[i], i + 1)
        cands = [r for r in sorted(T[i]) if r > i and coef[r]]
        if not cands:
            raise CertificateError(f"no exchange partner for column {i + 1}")
        r = cands[0]
        g[i + 1] = r
        T[i + 1] = (T[i] - {r}) | {i + 1}
    if T[k] != Tk_first:
        raise CertificateError(f"second pass ended at {sorted(T[k])}, not [1, {k}]")

    trace = BasisTrace(k, m, tuple(tuple(sorted(t)) for t in T), tuple(g[1:]), tuple(perm))
    problems = trace_violations(A, trace)
    if problems:
        raise CertificateError("; ".join(problems))
    return trace, A


def trace_violations(A: MatrixGF, trace: BasisTrace) -> list[str]:
    """Check the structural invariants of a basis trace."""
    k, m, T, g = trace.k, trace.m, trace.T, trace.g
    out = []
    if T[k] != tuple(range(1, k + 1)):
        out.append(f"T_{k} != [1,{k}]")
    if T[0] != T[m]:
        out.append("T_0 != T_m")
    for i in range(m):
        step = (set(T[i]) - {g[i]}) | {i + 1}
        if set(T[i + 1]) != step:
            out.append(f"T_{i + 1} is not an exchange step from T_{i}")
    for i in range(k + 1):
        if not set(range(1, i + 1)) <= set(T[i]):
            out.append(f"[1,{i}] not in T_{i}")
    if sorted(g) != list(range(1, m + 1)):
        out.append(f"g = {list(g)} is not a bijection")
    if m > k and g[k] != 1:
        out.append("g(k+1) != 1")
    for i in range(k + 1, m):
        if not g[i - 1] < g[i]:
            out.append(f"g({i}) >= g({i + 1})")
    for i in range(1, m + 1):
        if i in T[i - 1]:
            out.append(f"{i} in T_{i - 1}")
    for i in range(2, k + 2):
        if i in T[i - 2]:
            out.append(f"{i} in T_{i - 2}")
    for i, t in enumerate(T):
        if len(t) != k or rank_of_columns(A.spec, [_column(A, r) for r in t]) != k:
            out.append(f"T_{i} does not index a basis")
    return out


def lexmax_basis(A: MatrixGF, i: int) -> tuple[int, ...]:
    """Brute force: the lexicographically largest basis in the window [i-m+1, i].

    Window positions are integers i, i-1, ..., i-m+1 taken mod m into [1, m];
    a subset is compared by its decreasingly sorted window positions.
    """
    k, m = A.rows, A.cols
    window = list(range(i - m + 1, i + 1))
    best = None
    for combo in itertools.combinations(window, k):
        idx = [(w - 1) % m + 1 for w in combo]
        if rank_of_columns(A.spec, [_column(A, r) for r in idx]) != k:
            continue
        key = sorted(combo, reverse=True)
        if best is None or key > best[0]:
            best = (key, idx)
    return tuple(sorted(best[1]))


def build_C(A: MatrixGF, trace: BasisTrace) -> MatrixGF:
    F = A.spec
    k, m = trace.k, trace.m
    minus_one = F.neg(1)
    cols = []
    for j in range(1, m + 1):
        basis = trace.T[j - 1]
        if j in basis:
            raise CertificateError(f"{j} in T_{j - 1}")
        col = [0] * m
        for r, c in _expand(A, basis, j).items():
            col[r - 1] = c
        col[j - 1] = minus_one
        cols.append(col)
    C = MatrixGF.from_columns(F, cols, m)
    if not mat_mul(A, C).is_zero():
        raise CertificateError("AC != 0")
    if rank(C) != m - k:
        raise CertificateError("rank(C) != m - k")
    return C


def region_R(g, k: int, m: int) -> set[tuple[int, int]]:
    """1-based (row, column) positions of the staircase region."""
    R = set()
    for j in range(1, m + 1):
        gj = g[j - 1]
        if j <= k:
            rows = set(range(1, j + 1)) | set(range(gj, m + 1))
        else:
            rows = set(range(gj, j + 1))
        R.update((i, j) for i in rows)
    return R


def row_slices(R, k: int, m: int) -> tuple[tuple[int, ...], ...]:
    S = tuple(tuple(sorted(j for (i, j) in R if i == r)) for r in range(1, m + 1))
    for i, s in enumerate(S, 1):
        if len(s) != k + 1:
            raise CertificateError(f"S_{i} = {list(s)} has size {len(s)}, expected {k + 1}")
    if len(set(S)) != m:
        raise CertificateError("row slices of R are not pairwise distinct")
    return S


def closed_form_S(trace: BasisTrace) -> tuple[tuple[int, ...], ...]:
    """The explicit set formula g^-1([1,i]) + [i,k] / g^-1(T_{i-1}) + {i}."""
    k, m = trace.k, trace.m
    out = []
    for i in range(1, m + 1):
        if i <= k:
            s = {trace.ginv(v) for v in range(1, i + 1)} | set(range(i, k + 1))
        else:
            s = {trace.ginv(v) for v in trace.T[i - 1]} | {i}
        out.append(tuple(sorted(s)))
    return tuple(out)


def _cols_rank(C: MatrixGF, keep) -> int:
    return rank_of_columns(C.spec, [C.col(j - 1) for j in keep])


def find_S_prime(C: MatrixGF, S_i, k: int) -> tuple[int, ...]:
    m = C.cols
    for t in sorted(S_i):
        sp = set(S_i) - {t}
        if _cols_rank(C, [j for j in range(1, m + 1) if j not in sp]) == m - k:
            return tuple(sorted(sp))
    raise CertificateError(f"no rank witness inside S = {sorted(S_i)}")


def certify(A: MatrixGF) -> tuple[KernelCertificate, MatrixGF]:
    """Full construction.  Returns the certificate and the column-permuted A."""
    trace, A2 = build_bases(A)
    C = build_C(A2, trace)
    S = row_slices(region_R(trace.g, trace.k, trace.m), trace.k, trace.m)
    Sp = tuple(find_S_prime(C, s, trace.k) for s in S)
    cert = KernelCertificate(A.spec, C, trace, S, Sp)
    report = verify_certificate(A2, cert)
    if not report.ok:
        raise CertificateError(report.summary())
    return cert, A2


# -- verification ---------------------------------------------------------------


@dataclass
class Check:
    name: str
    ok: bool
    detail: str = ""


@dataclass
class CertificateReport:
    checks: list = field(default_factory=list)
    notes: list = field(default_factory=list)  # informational, never failures

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def get(self, name: str) -> Check:
        return next(c for c in self.checks if c.name == name)

    def summary(self) -> str:
        return "; ".join(f"{c.name}: {c.detail}" for c in self.checks if not c.ok)

    def lines(self) -> list[str]:
        out = []
        for c in self.checks:
            line = f"check {c.name} {'pass' if c.ok else 'fail'}"
            out.append(f"{line} {c.detail}" if c.detail else line)
        out.extend(f"note {n}" for n in self.notes)
        return out


def verify_certificate(A: MatrixGF, cert: KernelCertificate) -> CertificateReport:
    """Audit a claimed certificate against A (the column-permuted normalized matrix)."""
    rep = CertificateReport()
    F = A.spec
    k, m = A.rows, A.cols
    C = cert.C
    if (C.rows, C.cols) != (m, m) or C.spec != F:
        rep.checks.append(Check("shape", False, f"C is {C.rows}x{C.cols}, expected {m}x{m}"))
        return rep
    if len(cert.S) != m or len(cert.Sprime) != m:
        rep.checks.append(Check("shape", False, "need m sets S_i and S'_i"))
        return rep

    AC = mat_mul(A, C)
    bad = [(r + 1, c + 1) for r in range(AC.rows) for c in range(AC.cols) if AC[r, c]]
    rep.checks.append(Check("AC=0", not bad, f"nonzero at {bad[0]}" if bad else ""))

    rk = rank(C)
    rep.checks.append(Check("rank", rk == m - k, f"rank(C) = {rk}, expected {m - k}"
                            if rk != m - k else ""))

    msgs = []
    for i in range(1, m + 1):
        S = set(cert.S[i - 1])
        supp = {j for j in range(1, m + 1) if C[i - 1, j - 1]}
        if len(S) != k + 1 or not S <= set(range(1, m + 1)):
            msgs.append(f"|S_{i}| = {len(S)}")
        if not supp:
            msgs.append(f"row {i} is zero")
        elif not supp <= S:
            msgs.append(f"supp(C_{i}) has {sorted(supp - S)} outside S_{i}")
    if len({tuple(sorted(s)) for s in cert.S}) != m:
        msgs.append("S_i not pairwise distinct")
    rep.checks.append(Check("support", not msgs, "; ".join(msgs)))

    msgs = []
    for i in range(1, m + 1):
        Sp, S = set(cert.Sprime[i - 1]), set(cert.S[i - 1])
        if len(Sp) != k or not Sp <= S:
            msgs.append(f"S'_{i} is not a {k}-subset of S_{i}")
            continue
        r = _cols_rank(C, [j for j in range(1, m + 1) if j not in Sp])
        if r != m - k:
            msgs.append(f"columns outside S'_{i} have rank {r}")
    rep.checks.append(Check("witness", not msgs, "; ".join(msgs)))

    minus_one = F.neg(1)
    diag = [j for j in range(m) if C[j, j] != minus_one]
    rep.checks.append(Check("diagonal", not diag,
                            f"C_jj != -1 at j = {diag[0] + 1}" if diag else ""))
    tri = [(r + 1, c + 1) for r in range(k, m) for c in range(k, r) if C[r, c]]
    rep.checks.append(Check("triangular", not tri, f"nonzero below diagonal at {tri[0]}"
                            if tri else ""))

    tr = cert.trace
    if (tr.k, tr.m) == (k, m):
        problems = trace_violations(A, tr)
        rep.checks.append(Check("trace", not problems, "; ".join(problems)))
        if not problems:
            R = region_R(tr.g, k, m)
            outside = [(i + 1, j + 1) for i in range(m) for j in range(m)
                       if C[i, j] and (i + 1, j + 1) not in R]
            rep.checks.append(Check("region", not outside,
                                    f"nonzero outside R at {outside[0]}" if outside else ""))
            cf = closed_form_S(tr)
            diff = [i + 1 for i in range(m) if cf[i] != tuple(sorted(cert.S[i]))]
            if diff:
                rep.notes.append(
                    "closed-form S_i differs from the row slices of R on rows "
                    + " ".join(map(str, diff))
                )
    else:
        rep.checks.append(Check("trace", False, f"trace is for k={tr.k}, m={tr.m}"))
    return rep
