"""The template hypergraph H and the implicit big hypergraph K.

H has vertices 1..m and one edge S_i of color i per row of C.  K lives on
F x [1, m]; for each color i and label x in X_i it holds an edge on the
vertices {(a_j, j) : j in S_i} whenever sum_{j in S_i} C_ij a_j = x.  K is
never stored: edges are generated on demand and copies of H are counted by
enumerating assignments a in F^m.  A copy sends vertex j of H into class j
of K, so it is exactly an assignment a with (Ca)_i in X_i for every i.

Edge keys are (color, label, values of a on S_i) with 0-based colors.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .certificate import KernelCertificate
from .enumerate import chunked_sum, check_budget, digits, linear_form, membership
from .gf import FieldSpec
from .matgf import MatrixGF, kernel_basis, mat_vec, solve_particular

MATERIALIZE_LIMIT = 10**6


@dataclass(frozen=True)
class TemplateHypergraph:
    m: int
    edges: tuple[tuple[int, frozenset], ...]  # (color, vertex set), 1-based

    @classmethod
    def from_certificate(cls, cert: KernelCertificate):
        edges = tuple((i + 1, frozenset(s)) for i, s in enumerate(cert.S))
        if len({e for _, e in edges}) != len(edges):
            raise ValueError("template edges are not pairwise distinct")
        return cls(cert.m, edges)


@dataclass(frozen=True)
class BigHypergraph:
    spec: FieldSpec
    C: MatrixGF
    S: tuple[tuple[int, ...], ...]  # 1-based vertex sets
    sets: tuple[frozenset, ...]
    k: int

    @classmethod
    def build(cls, cert: KernelCertificate, sets):
        return cls(cert.spec, cert.C, cert.S, tuple(frozenset(s) for s in sets), cert.k)

    @property
    def m(self) -> int:
        return self.C.rows

    @property
    def edges_per_label(self) -> int:
        return self.spec.q ** self.k

    def positions(self, i: int) -> list[int]:
        return [j - 1 for j in self.S[i]]

    def row_form(self, i: int) -> list[tuple[int, int]]:
        return [(j, self.C[i, j]) for j in self.positions(i)]

    def label(self, i: int, values) -> int:
        """sum_{j in S_i} C_ij a_j for the values of a on S_i (in S_i order)."""
        F = self.spec
        acc = 0
        for (_, c), a in zip(self.row_form(i), values):
            acc = F.add(acc, F.mul(c, a))
        return acc

    def edge_count(self) -> int:
        return self.edges_per_label * sum(len(s) for s in self.sets)

    def edge_key(self, i: int, assignment) -> tuple:
        vals = tuple(int(assignment[j]) for j in self.positions(i))
        return (i, self.label(i, vals), vals)

    def with_sets(self, sets) -> BigHypergraph:
        return BigHypergraph(self.spec, self.C, self.S, tuple(frozenset(s) for s in sets), self.k)


def edge_exists(K: BigHypergraph, i: int, x: int, partial: dict) -> bool:
    """partial maps 1-based vertex class j in S_i to a_j."""
    if set(partial) != set(K.S[i]):
        raise ValueError(f"assignment must be defined exactly on S_{i + 1} = {list(K.S[i])}")
    if x not in K.sets[i]:
        return False
    return K.label(i, [partial[j] for j in K.S[i]]) == x


def edges_with(K: BigHypergraph, i: int, x: int):
    """All value tuples on S_i forming an edge of color i and label x."""
    F = K.spec
    form = K.row_form(i)
    t = next(n for n, (_, c) in enumerate(form) if c)
    ct_inv = F.inv(form[t][1])
    others = [n for n in range(len(form)) if n != t]
    for free in itertools.product(range(F.q), repeat=len(others)):
        vals = [0] * len(form)
        acc = 0
        for n, v in zip(others, free):
            vals[n] = v
            acc = F.add(acc, F.mul(form[n][1], v))
        vals[t] = F.mul(ct_inv, F.sub(x, acc))
        yield tuple(vals)


@dataclass(frozen=True)
class CopyOfH:
    assignment: tuple[int, ...]
    labels: tuple[int, ...]

    def edges(self, K: BigHypergraph) -> list[tuple]:
        return [
            (i, self.labels[i], tuple(self.assignment[j] for j in K.positions(i)))
            for i in range(K.m)
        ]


def copy_assignments(K: BigHypergraph, x) -> np.ndarray:
    """(q^k, m) array of the assignments u with Cu = x, in odometer order.

    Row r is u0 + sum_t c_t w_t where (c_1..c_k) are the base-q digits of r.
    """
    F = K.spec
    x = tuple(int(v) for v in x)
    if any(x[i] not in K.sets[i] for i in range(K.m)):
        raise ValueError("x has a coordinate outside its set")
    u0 = solve_particular(K.C, x)
    if u0 is None:
        raise ValueError("x is not in the column space of C, so it is not a solution")
    W = kernel_basis(K.C)
    if W.cols != K.k:
        raise ValueError(f"kernel of C has dimension {W.cols}, expected {K.k}")
    coeffs = digits(F.q, K.k, 0, F.q**K.k)
    out = np.tile(np.asarray(u0, dtype=np.int64), (coeffs.shape[1], 1))
    for t, w in enumerate(W.columns()):
        for j, e in enumerate(w):
            if e:
                out[:, j] = F.add_array(out[:, j], F.scale_array(e, coeffs[t]))
    return out


def copies_for_solution(K: BigHypergraph, x) -> list[CopyOfH]:
    """The q^k copies {u : Cu = x}, in odometer order of kernel coordinates."""
    x = tuple(int(v) for v in x)
    return [CopyOfH(tuple(int(v) for v in u), x) for u in copy_assignments(K, x)]


def _removed_codes(K: BigHypergraph, removed):
    q = K.spec.q
    codes = [[] for _ in range(K.m)]
    for i, _x, vals in removed:
        code = 0
        for v in vals:
            code = code * q + v
        codes[i].append(code)
    return [np.array(sorted(set(c)), dtype=np.int64) for c in codes]


def count_copies(K: BigHypergraph, removed=None, budget=None, threads: int = 1) -> int:
    """#{a in F^m : (Ca)_i in X_i for all i}, skipping copies that use a removed edge."""
    F, m = K.spec, K.m
    total = F.q**m
    check_budget("copy enumeration", total, budget)
    if any(not s for s in K.sets):
        return 0
    member = [membership(F, s) for s in K.sets]
    forms = [K.row_form(i) for i in range(m)]
    codes = _removed_codes(K, removed) if removed else None
    if codes and F.q ** (K.k + 1) >= 2**62:
        raise ValueError("field too large for removed-edge encoding")

    def fn(a, b):
        vals = digits(F.q, m, a, b)
        for i in range(m):
            ok = member[i][linear_form(F, forms[i], vals)]
            if codes is not None and codes[i].size:
                code = np.zeros(vals.shape[1], dtype=np.int64)
                for j, _ in forms[i]:
                    code = code * F.q + vals[j]
                ok &= ~np.isin(code, codes[i])
            vals = vals[:, ok]
            if not vals.shape[1]:
                return 0
        return int(vals.shape[1])

    return chunked_sum(fn, total, threads)


def enumerate_copies(K: BigHypergraph, budget=None) -> list[CopyOfH]:
    """Every copy, by exhaustive enumeration (small instances)."""
    F, m = K.spec, K.m
    check_budget("copy enumeration", F.q**m, budget)
    out = []
    for a in itertools.product(range(F.q), repeat=m):
        labels = tuple(mat_vec(K.C, a))
        if all(labels[i] in K.sets[i] for i in range(m)):
            out.append(CopyOfH(a, labels))
    return out


def verify_copy_labels(A: MatrixGF, K: BigHypergraph, copy: CopyOfH) -> bool:
    """The labels of a genuine copy solve Ax = 0."""
    if tuple(mat_vec(K.C, copy.assignment)) != tuple(copy.labels):
        return False
    if any(copy.labels[i] not in K.sets[i] for i in range(K.m)):
        return False
    return not any(mat_vec(A, copy.labels))
