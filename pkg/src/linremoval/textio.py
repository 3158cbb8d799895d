"""Line-oriented text formats for instances and certificates.

Instance:
    field p n [c_0 ... c_n]        modulus coefficients ascending, n > 1 only
    k m
    <k lines of m elements>        the matrix A
    <one line of k elements>       b (omitted when k = 0)
    X1: e e ...                    one line per variable
Blank lines and lines starting with '#' are ignored.

Certificate:
    certificate
    field ...
    k K / m M
    colperm, g                     1-based permutations
    T0 .. Tm                       sorted 1-based index sets
    C rows cols + rows             row-major canonical elements
    S1 .. Sm, S'1 .. S'm
    end
"""

from __future__ import annotations

from .certificate import BasisTrace, KernelCertificate
from .gf import FieldError, FieldSpec
from .matgf import MatrixGF
from .normalize import LinSystem


class ParseError(ValueError):
    def __init__(self, line: int, what: str, msg: str):
        super().__init__(f"line {line}: {what}: {msg}")
        self.line = line
        self.what = what


def _ints(tokens, line, what):
    try:
        return [int(t) for t in tokens]
    except ValueError:
        raise ParseError(line, what, f"expected integers, got {' '.join(tokens)!r}") from None


def _content_lines(text: str):
    for n, raw in enumerate(text.splitlines(), 1):
        s = raw.strip()
        if s and not s.startswith("#"):
            yield n, s


def format_field(F: FieldSpec) -> str:
    parts = ["field", str(F.p), str(F.n)] + [str(c) for c in F.modulus]
    return " ".join(parts)


def _parse_field(line: int, s: str) -> FieldSpec:
    tok = s.split()
    if not tok or tok[0] != "field":
        raise ParseError(line, "field", "expected 'field p n [modulus coefficients]'")
    nums = _ints(tok[1:], line, "field")
    if len(nums) < 2:
        raise ParseError(line, "field", "expected p and n")
    try:
        return FieldSpec(nums[0], nums[1], tuple(nums[2:]))
    except FieldError as e:
        raise ParseError(line, "field", str(e)) from None


def _elements(F, tokens, line, what, count=None):
    vals = _ints(tokens, line, what)
    if count is not None and len(vals) != count:
        raise ParseError(line, what, f"expected {count} elements, got {len(vals)}")
    for v in vals:
        if not 0 <= v < F.q:
            raise ParseError(line, what, f"{v} is not an element of {F!r}")
    return vals


def format_instance(s: LinSystem) -> str:
    lines = [format_field(s.spec), f"{s.k} {s.m}"]
    lines += [" ".join(map(str, s.A.row(r))) for r in range(s.k)]
    if s.k:
        lines.append(" ".join(map(str, s.b)))
    for i, x in enumerate(s.sets, 1):
        lines.append(" ".join([f"X{i}:"] + [str(e) for e in sorted(x)]))
    return "\n".join(lines) + "\n"


def parse_instance(text: str) -> LinSystem:
    it = _content_lines(text)

    def nxt(what):
        try:
            return next(it)
        except StopIteration:
            raise ParseError(-1, what, "unexpected end of input") from None

    n, s = nxt("field")
    F = _parse_field(n, s)
    n, s = nxt("dimensions")
    dims = _ints(s.split(), n, "dimensions")
    if len(dims) != 2 or dims[0] < 0 or dims[1] < 1:
        raise ParseError(n, "dimensions", "expected 'k m' with k >= 0, m >= 1")
    k, m = dims
    rows = []
    for r in range(k):
        n, s = nxt(f"A row {r + 1}")
        rows.append(_elements(F, s.split(), n, f"A row {r + 1}", m))
    b = []
    if k:
        n, s = nxt("b")
        b = _elements(F, s.split(), n, "b", k)
    sets = []
    for i in range(1, m + 1):
        n, s = nxt(f"X{i}")
        head, _, rest = s.partition(":")
        if head.strip() != f"X{i}":
            raise ParseError(n, f"X{i}", f"expected 'X{i}: elements', got {s!r}")
        sets.append(frozenset(_elements(F, rest.split(), n, f"X{i}")))
    for n, s in it:
        raise ParseError(n, "trailing", f"unexpected content {s!r}")
    A = MatrixGF.from_rows(F, rows, m) if k else MatrixGF.zeros(F, 0, m)
    return LinSystem(F, A, tuple(b), tuple(sets))


def format_matrix(M: MatrixGF) -> list[str]:
    return [f"{M.rows} {M.cols}"] + [" ".join(map(str, M.row(r))) for r in range(M.rows)]


def format_certificate(cert: KernelCertificate) -> str:
    tr = cert.trace
    out = ["certificate", format_field(cert.spec), f"k {tr.k}", f"m {tr.m}"]
    out.append("colperm " + " ".join(str(p + 1) for p in tr.colperm))
    out.append("g " + " ".join(map(str, tr.g)))
    for i, t in enumerate(tr.T):
        out.append(" ".join([f"T{i}"] + [str(v) for v in t]))
    C = format_matrix(cert.C)
    out.append("C " + C[0])
    out.extend(C[1:])
    for i, s in enumerate(cert.S, 1):
        out.append(" ".join([f"S{i}"] + [str(v) for v in s]))
    for i, s in enumerate(cert.Sprime, 1):
        out.append(" ".join([f"S'{i}"] + [str(v) for v in s]))
    out.append("end")
    return "\n".join(out) + "\n"


def parse_certificate(text: str) -> KernelCertificate:
    lines = list(_content_lines(text))
    pos = 0

    def nxt(what):
        nonlocal pos
        if pos >= len(lines):
            raise ParseError(-1, what, "unexpected end of input")
        pos += 1
        return lines[pos - 1]

    def keyed(key, what=None):
        n, s = nxt(what or key)
        tok = s.split()
        if not tok or tok[0] != key:
            raise ParseError(n, what or key, f"expected '{key} ...', got {s!r}")
        return n, tok[1:]

    n, s = nxt("header")
    if s != "certificate":
        raise ParseError(n, "header", "expected 'certificate'")
    F = _parse_field(*nxt("field"))
    n, tok = keyed("k")
    (k,) = _ints(tok, n, "k")
    n, tok = keyed("m")
    (m,) = _ints(tok, n, "m")
    n, tok = keyed("colperm")
    colperm = tuple(v - 1 for v in _ints(tok, n, "colperm"))
    n, tok = keyed("g")
    g = tuple(_ints(tok, n, "g"))
    T = []
    for i in range(m + 1):
        n, tok = keyed(f"T{i}")
        T.append(tuple(_ints(tok, n, f"T{i}")))
    n, tok = keyed("C")
    dims = _ints(tok, n, "C")
    if dims != [m, m]:
        raise ParseError(n, "C", f"expected dimensions {m} {m}")
    rows = []
    for r in range(m):
        n, s = nxt(f"C row {r + 1}")
        rows.append(_elements(F, s.split(), n, f"C row {r + 1}", m))
    S = []
    for i in range(1, m + 1):
        n, tok = keyed(f"S{i}")
        S.append(tuple(_ints(tok, n, f"S{i}")))
    Sp = []
    for i in range(1, m + 1):
        n, tok = keyed(f"S'{i}")
        Sp.append(tuple(_ints(tok, n, f"S'{i}")))
    n, s = nxt("end")
    if s != "end":
        raise ParseError(n, "end", "expected 'end'")
    trace = BasisTrace(k, m, tuple(T), g, colperm)
    return KernelCertificate(F, MatrixGF.from_rows(F, rows, m), trace, tuple(S), tuple(Sp))
