"""Seed-deterministic instance generators.

All randomness comes from random.Random(seed), so instances are stable
across numpy versions and platforms.
"""

from __future__ import annotations

import itertools
import random

from .gf import FieldSpec
from .matgf import MatrixGF, kernel_basis, rank, rank_of_columns, solve_particular
from .normalize import LinSystem


def random_system(
    spec: FieldSpec,
    k: int,
    m: int,
    seed: int,
    density: float = 0.5,
    planted: int = 0,
    homogeneous: bool = False,
) -> LinSystem:
    """Random full-rank k x m system with random sets and optional planted solutions."""
    if k < 1 or m < k + 2:
        raise ValueError(f"need 1 <= k and m >= k + 2, got k={k}, m={m}")
    if not 0.0 <= density <= 1.0:
        raise ValueError("density must lie in [0, 1]")
    rnd = random.Random(seed)
    q = spec.q
    while True:
        A = MatrixGF.from_rows(spec, [[rnd.randrange(q) for _ in range(m)] for _ in range(k)])
        if rank(A) == k:
            break
    b = [0] * k if homogeneous else [rnd.randrange(q) for _ in range(k)]
    sets = [{e for e in range(q) if rnd.random() < density} for _ in range(m)]
    if planted:
        x0 = solve_particular(A, b)
        W = kernel_basis(A).columns()
        for _ in range(planted):
            x = list(x0)
            for w in W:
                c = rnd.randrange(q)
                x = [spec.add(a, spec.mul(c, e)) for a, e in zip(x, w)]
            for i, v in enumerate(x):
                sets[i].add(v)
    return LinSystem(spec, A, tuple(b), tuple(frozenset(x) for x in sets))


def _normalized_B_ok(spec, B, k, mk) -> bool:
    if any(sum(1 for e in row if e) < 2 for row in B):
        return False
    if any(not any(B[i][j] for i in range(k)) for j in range(mk)):
        return False
    return all(
        rank_of_columns(spec, [B[i], B[j]]) == 2 for i, j in itertools.combinations(range(k), 2)
    )


def canonical_shape_feasible(q: int, k: int, m: int) -> bool:
    """Whether some (I_k | B) over GF(q) meets the canonical-form conditions.

    The rows of B must be k pairwise non-proportional vectors of weight >= 2
    in GF(q)^(m-k); there are (q^d - 1)/(q - 1) - d such directions.
    """
    d = m - k
    if k < 1 or d < 2:
        return False
    return (q**d - 1) // (q - 1) - d >= k


def random_normalized_matrix(spec: FieldSpec, k: int, m: int, seed: int,
                             max_tries: int = 10_000) -> MatrixGF:
    """A = (I_k | B) with B satisfying the canonical-form conditions."""
    if not canonical_shape_feasible(spec.q, k, m):
        raise ValueError(f"no canonical {k}x{m} matrix exists over {spec!r}")
    rnd = random.Random(seed)
    mk = m - k
    for _ in range(max_tries):
        B = [[rnd.randrange(spec.q) for _ in range(mk)] for _ in range(k)]
        if _normalized_B_ok(spec, B, k, mk):
            return MatrixGF.from_rows(
                spec, [[int(i == j) for j in range(k)] + B[i] for i in range(k)]
            )
    raise ValueError(f"no canonical {k}x{m} matrix over {spec!r} found")


def random_normalized_system(spec: FieldSpec, k: int, m: int, seed: int,
                             density: float = 0.5, planted: int = 0) -> LinSystem:
    A = random_normalized_matrix(spec, k, m, seed)
    rnd = random.Random(seed + 1_000_003)
    q = spec.q
    sets = [{e for e in range(q) if rnd.random() < density} for _ in range(m)]
    W = kernel_basis(A).columns()
    for _ in range(planted):
        x = [0] * m
        for w in W:
            c = rnd.randrange(q)
            x = [spec.add(a, spec.mul(c, e)) for a, e in zip(x, w)]
        for i, v in enumerate(x):
            sets[i].add(v)
    return LinSystem(spec, A, (0,) * k, tuple(frozenset(x) for x in sets))


def ap_system(spec: FieldSpec, length: int, X) -> LinSystem:
    """x_j - 2 x_{j+1} + x_{j+2} = 0 for j = 1..length-2, every variable in X.

    Solutions are the ordered length-term progressions (a, a+d, ...) inside
    X, constant ones (d = 0) included.
    """
    if length < 3:
        raise ValueError("progression length must be at least 3")
    if spec.p < length:
        raise ValueError(f"characteristic {spec.p} is smaller than the length {length}")
    X = frozenset(X)
    minus_two = spec.neg(spec.add(1, 1))
    rows = []
    for j in range(length - 2):
        row = [0] * length
        row[j], row[j + 1], row[j + 2] = 1, minus_two, 1
        rows.append(row)
    A = MatrixGF.from_rows(spec, rows, length)
    return LinSystem(spec, A, (0,) * (length - 2), (X,) * length)


def count_aps(spec: FieldSpec, length: int, X) -> int:
    """Ordered progressions in X by direct (start, difference) enumeration."""
    X = set(X)
    n = 0
    for a in range(spec.q):
        for d in range(spec.q):
            t, ok = a, True
            for _ in range(length):
                if t not in X:
                    ok = False
                    break
                t = spec.add(t, d)
            n += ok
    return n


def random_subset(spec: FieldSpec, density: float, seed: int) -> frozenset:
    rnd = random.Random(seed)
    return frozenset(e for e in range(spec.q) if rnd.random() < density)
