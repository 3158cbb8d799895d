"""Desk-scale removal: destroy every solution by deleting few set elements.

The pipeline normalizes the system, builds the kernel certificate and the
hypergraph K, picks an edge set E' meeting every copy of H, turns E' into
element removals by the q^k/m pigeonhole rule, pulls the removals back to
the original sets and re-counts.  Every step that the theory guarantees is
checked rather than assumed.
"""

from __future__ import annotations

import heapq
import itertools
import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy import sparse
from scipy.optimize import Bounds, LinearConstraint, milp

from .certificate import KernelCertificate, certify
from .enumerate import BudgetError, chunked_sum, check_budget, digits, linear_form, membership
from .hypergraph import (
    MATERIALIZE_LIMIT,
    BigHypergraph,
    copies_for_solution,
    count_copies,
)
from .matgf import _reduce
from .normalize import (
    Degenerate,
    DropVariable,
    ForceZero,
    LinSystem,
    NormalizedSystem,
    apply_column_permutation,
    apply_removals,
    normalize,
    pull_back_removals,
)

STRATEGIES = ("greedy", "all", "exact")
EXACT_COPY_LIMIT = 10**4
BB_FAMILY_LIMIT = 40
ORACLE_SET_LIMIT = 24
ORACLE_SOLUTION_LIMIT = 10**3


class PipelineError(AssertionError):
    """A step the mathematics guarantees did not hold."""


# -- solutions -------------------------------------------------------------------


def _parametrize(s: LinSystem):
    """(pivots, free, forms) with x_p = rhs_p + sum c x_f, or None if inconsistent."""
    F, k, m = s.spec, s.k, s.m
    work = [list(s.A.row(r)) + [s.b[r]] for r in range(k)]
    pivots = _reduce(F, work, m + 1)
    if pivots and pivots[-1] == m:
        return None
    free = [c for c in range(m) if c not in pivots]
    forms = []
    for r, p in enumerate(pivots):
        coeffs = [(n, F.neg(work[r][f])) for n, f in enumerate(free) if work[r][f]]
        forms.append((p, work[r][m], coeffs))
    return pivots, free, forms


def _solution_chunks(s: LinSystem, budget, want_values: bool):
    F = s.spec
    par = _parametrize(s)
    if par is None or any(not x for x in s.sets):
        return None
    pivots, free, forms = par
    total = F.q ** len(free)
    check_budget("solution enumeration", total, budget)
    member = [membership(F, x) for x in s.sets]

    def fn(a, b):
        vals = digits(F.q, len(free), a, b)
        keep = np.ones(vals.shape[1], dtype=bool)
        for n, f in enumerate(free):
            keep &= member[f][vals[n]]
        vals = vals[:, keep]
        pv = []
        for p, rhs, coeffs in forms:
            x = F.add_array(linear_form(F, coeffs, vals), rhs)
            ok = member[p][x]
            vals = vals[:, ok]
            pv = [v[ok] for v in pv] + [x[ok]]
        if not want_values:
            return int(vals.shape[1])
        full = np.empty((s.m, vals.shape[1]), dtype=np.int64)
        for n, f in enumerate(free):
            full[f] = vals[n]
        for (p, _, _), x in zip(forms, pv):
            full[p] = x
        return full

    return fn, total


def count_solutions(s: LinSystem, budget=None, threads: int = 1) -> int:
    """Number of x with Ax = b and x_i in X_i, over the parametrized solution space."""
    res = _solution_chunks(s, budget, want_values=False)
    if res is None:
        return 0
    fn, total = res
    return chunked_sum(fn, total, threads)


def iter_solutions(s: LinSystem, budget=None):
    res = _solution_chunks(s, budget, want_values=True)
    if res is None:
        return
    fn, total = res
    step = 1 << 16
    for a in range(0, total, step):
        block = fn(a, min(total, a + step))
        for col in block.T:
            yield tuple(int(v) for v in col)


# -- hitting sets -----------------------------------------------------------------


def greedy_hitting_set(families) -> list:
    """Repeatedly take the element lying in most unhit families (ties: smallest)."""
    where: dict = {}
    for n, fam in enumerate(families):
        for e in fam:
            where.setdefault(e, []).append(n)
    alive = [True] * len(families)
    count = {e: len(ns) for e, ns in where.items()}
    heap = [(-c, e) for e, c in count.items()]
    heapq.heapify(heap)
    chosen = []
    remaining = len(families)
    while remaining:
        c, e = heapq.heappop(heap)
        if -c != count[e]:
            heapq.heappush(heap, (-count[e], e))
            continue
        chosen.append(e)
        for n in where[e]:
            if alive[n]:
                alive[n] = False
                remaining -= 1
                for e2 in families[n]:
                    count[e2] -= 1
    return chosen


def _reduce_families(fams: list) -> list:
    """Drop dominated elements and superset families until nothing changes.

    An element whose families are a subset of another element's can be
    swapped for that element in any hitting set, and a family containing
    another family is hit whenever the smaller one is.
    """
    fams = list(set(fams))
    while True:
        occ: dict = {}
        for n, f in enumerate(fams):
            for e in f:
                occ.setdefault(e, set()).add(n)
        dominated = set()
        elems = sorted(occ, key=lambda e: (-len(occ[e]), e))
        for a, e in enumerate(elems):
            for f in elems[:a]:
                if f not in dominated and occ[e] <= occ[f]:
                    dominated.add(e)
                    break
        fams2 = [f - dominated for f in fams]
        fams2.sort(key=len)
        kept: list = []
        for f in fams2:
            if not any(g <= f for g in kept):
                kept.append(f)
        if len(kept) == len(fams) and not dominated:
            return kept
        fams = kept


def _components(fams: list) -> list[list]:
    parent = list(range(len(fams)))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    owner: dict = {}
    for n, f in enumerate(fams):
        for e in f:
            if e in owner:
                parent[find(n)] = find(owner[e])
            else:
                owner[e] = n
    groups: dict = {}
    for n in range(len(fams)):
        groups.setdefault(find(n), []).append(fams[n])
    return list(groups.values())


def _milp_hitting_set(comp: list) -> list:
    """Minimum hitting set as a 0/1 program solved by HiGHS."""
    elems = sorted({e for f in comp for e in f})
    index = {e: n for n, e in enumerate(elems)}
    rows = np.repeat(np.arange(len(comp)), [len(f) for f in comp])
    cols = np.array([index[e] for f in comp for e in f])
    M = sparse.csr_array((np.ones(len(cols)), (rows, cols)), shape=(len(comp), len(elems)))
    res = milp(
        np.ones(len(elems)),
        constraints=LinearConstraint(M, lb=1),
        integrality=np.ones(len(elems)),
        bounds=Bounds(0, 1),
    )
    if not res.success:
        raise RuntimeError(f"hitting set program failed: {res.message}")
    chosen = [e for e, v in zip(elems, res.x) if v > 0.5]
    if any(f.isdisjoint(chosen) for f in comp):
        raise RuntimeError("hitting set program returned an infeasible point")
    return chosen


def min_hitting_set(families, node_limit: int = 2_000_000, solver: str = "auto") -> list:
    """Exact minimum hitting set.

    After dominance reductions, connected components are solved separately:
    small ones by branch and bound, larger ones (solver "auto") by an
    integer program.  solver="bb" forces branch and bound everywhere,
    solver="milp" forces the integer program.  The branch-and-bound lower bound is the larger of a greedy disjoint packing and
    ceil(#unhit / max degree).  Branching on the elements e_1..e_r of an
    unhit family, branch t forbids e_1..e_{t-1}.
    """
    fams = [frozenset(f) for f in families]
    if any(not f for f in fams):
        raise ValueError("an empty family cannot be hit")
    nodes = 0

    def lower_bound(unhit, freq):
        used = set()
        packed = 0
        for f in sorted(unhit, key=len):
            if used.isdisjoint(f):
                used |= f
                packed += 1
        return max(packed, -(-len(unhit) // max(freq.values())))

    def solve(comp):
        nonlocal nodes
        best = sorted(greedy_hitting_set(comp))

        def rec(chosen, unhit, forbidden):
            nonlocal best, nodes
            nodes += 1
            if nodes > node_limit:
                raise BudgetError("exact hitting set search", nodes, node_limit)
            if not unhit:
                if len(chosen) < len(best):
                    best = sorted(chosen)
                return
            unhit = [f - forbidden for f in unhit]
            if any(not f for f in unhit):
                return
            freq = Counter(e for f in unhit for e in f)
            if len(chosen) + lower_bound(unhit, freq) >= len(best):
                return
            pick = min(unhit, key=lambda f: (len(f), sorted(f)))
            banned = set(forbidden)
            for e in sorted(pick, key=lambda e: (-freq[e], e)):
                rec(chosen + [e], [f for f in unhit if e not in f], frozenset(banned))
                banned.add(e)

        rec([], comp, frozenset())
        return best

    if solver not in ("auto", "bb", "milp"):
        raise ValueError(f"unknown solver {solver!r}")
    out = []
    for comp in _components(_reduce_families(fams)):
        use_milp = solver == "milp" or (solver == "auto" and len(comp) > BB_FAMILY_LIMIT)
        out.extend(_milp_hitting_set(comp) if use_milp else solve(comp))
    return sorted(out)


def hitting_edge_set(copy_edges, strategy: str = "greedy") -> list:
    """E' meeting every copy.  copy_edges is a list of per-copy edge-key lists."""
    if strategy not in STRATEGIES and strategy != "all-copy-edges":
        raise ValueError(f"unknown strategy {strategy!r}")
    if not copy_edges:
        return []
    if strategy == "greedy":
        return greedy_hitting_set(copy_edges)
    if strategy in ("all", "all-copy-edges"):
        return sorted({e for edges in copy_edges for e in edges})
    if len(copy_edges) > EXACT_COPY_LIMIT:
        raise BudgetError("exact strategy (copies)", len(copy_edges), EXACT_COPY_LIMIT)
    return min_hitting_set(copy_edges)


def pigeonhole_elements(edges, q: int, k: int, m: int) -> dict[int, list[int]]:
    """Remove x from X_i when E' has at least q^k/m edges of color i and label x."""
    counts = Counter((i, x) for i, x, _ in edges)
    out: dict[int, list[int]] = {}
    for (i, x), c in sorted(counts.items()):
        if c * m >= q**k:
            out.setdefault(i, []).append(x)
    pairs = sum(len(v) for v in out.values())
    if pairs * q**k > m * len(edges):
        raise PipelineError("pigeonhole bound on removed pairs violated")
    return out


# -- oracle -------------------------------------------------------------------------


def min_element_removal_bruteforce(s: LinSystem, budget=None) -> int:
    """Fewest element deletions (over all sets) leaving no solution."""
    total = sum(len(x) for x in s.sets)
    sols = []
    for sol in iter_solutions(s, budget):
        sols.append(sol)
        if len(sols) > ORACLE_SOLUTION_LIMIT and total > ORACLE_SET_LIMIT:
            raise BudgetError("removal oracle (solutions)", len(sols), ORACLE_SOLUTION_LIMIT)
    if not sols:
        return 0
    fams = [frozenset(enumerate(sol)) for sol in sols]
    # branch and bound only, so the oracle does not share the pipeline's solver
    return len(min_hitting_set(fams, solver="bb"))


# -- pipeline ------------------------------------------------------------------------


@dataclass
class RemovalReport:
    status: str  # "normalized", "solution-free" or "unconstrained"
    strategy: str
    q: int
    k: int = 0
    m: int = 0
    solutions_before: int = 0
    normalized_solutions_before: int = 0
    copies_before: int = 0
    edge_set_size: int = 0
    threshold: Fraction = Fraction(0)
    removed_normalized: dict = field(default_factory=dict)
    removed_original: dict = field(default_factory=dict)
    h_free: bool = True
    normalized_solution_free: bool = True
    original_solution_free: bool = False
    final_solutions: int = -1
    certificate: KernelCertificate | None = None
    normalized: NormalizedSystem | None = None

    @property
    def removed_pairs(self) -> int:
        return sum(len(v) for v in self.removed_normalized.values())

    @property
    def removed_elements(self) -> int:
        return sum(len(v) for v in self.removed_original.values())

    @property
    def pigeonhole_bound_ok(self) -> bool:
        if self.status != "normalized":
            return True
        return self.removed_pairs * self.q**self.k <= self.m * self.edge_set_size

    @property
    def ok(self) -> bool:
        return (
            self.original_solution_free
            and self.final_solutions == 0
            and (not self.h_free or self.normalized_solution_free)
            and self.pigeonhole_bound_ok
        )

    def as_dict(self) -> dict:
        return {
            "status": self.status,
            "strategy": self.strategy,
            "counts": {
                "solutions_before": self.solutions_before,
                "normalized_solutions_before": self.normalized_solutions_before,
                "copies_before": self.copies_before,
                "final_solutions": self.final_solutions,
            },
            "removal": {
                "k": self.k,
                "m": self.m,
                "edge_set_size": self.edge_set_size,
                "threshold": str(self.threshold),
                "removed_pairs": self.removed_pairs,
                "removed_elements": self.removed_elements,
                "removed_normalized": {str(i + 1): v for i, v in self.removed_normalized.items()},
                "removed_original": {str(i + 1): v for i, v in self.removed_original.items()},
            },
            "verification": {
                "h_free": self.h_free,
                "normalized_solution_free": self.normalized_solution_free,
                "original_solution_free": self.original_solution_free,
                "pigeonhole_bound": self.pigeonhole_bound_ok,
            },
        }


def _degenerate_removals(d: Degenerate):
    """Empty one smallest set of an unconstrained system (if it has solutions)."""
    cands = []  # (size, order, kind, key, elements)
    for v, x in enumerate(d.system.sets):
        cands.append((len(x), 0, v, "cur", sorted(x)))
    drops = [i for i, r in enumerate(d.transcript.records) if isinstance(r, DropVariable)]
    for idx, x in zip(drops, d.free_sets):
        cands.append((len(x), 1, idx, "gone", sorted(x)))
    for idx, r in enumerate(d.transcript.records):
        if isinstance(r, ForceZero):
            cands.append((1, 1, idx, "gone", [0]))
    if not cands or min(c[0] for c in cands) == 0:
        return {}, {}
    size, _, key, kind, elems = min(cands, key=lambda c: c[:3])
    return ({key: elems}, {}) if kind == "cur" else ({}, {key: elems})


def removal_pipeline(
    s: LinSystem, strategy: str = "greedy", budget=None, threads: int = 1
) -> RemovalReport:
    F = s.spec
    rep = RemovalReport(status="", strategy=strategy, q=F.q)
    rep.solutions_before = count_solutions(s, budget, threads)
    out = normalize(s)

    if isinstance(out, Degenerate):
        rep.status = out.kind
        if out.kind == "unconstrained":
            cur, gone = _degenerate_removals(out)
            rep.removed_normalized = cur
            rep.removed_original = pull_back_removals(out.transcript, cur, gone)
    else:
        ns = out
        cert, A2 = certify(ns.system.A)
        ns = apply_column_permutation(ns, cert.trace.colperm)
        if ns.system.A != A2:
            raise PipelineError("permuted system does not match the certificate's matrix")
        rep.status = "normalized"
        rep.certificate = cert
        rep.normalized = ns
        k, m = ns.k, ns.m
        rep.k, rep.m = k, m
        rep.threshold = Fraction(F.q**k, m)
        K = BigHypergraph.build(cert, ns.system.sets)
        if K.edge_count() > MATERIALIZE_LIMIT:
            raise BudgetError("hypergraph materialization (edges)", K.edge_count(),
                              MATERIALIZE_LIMIT)
        nsols = list(iter_solutions(ns.system, budget))
        rep.normalized_solutions_before = len(nsols)
        if rep.solutions_before != len(nsols) * ns.free_factor:
            raise PipelineError("normalization changed the solution count")
        rep.copies_before = count_copies(K, budget=budget, threads=threads)
        if rep.copies_before != F.q**k * len(nsols):
            raise PipelineError("copy count differs from q^k times the solution count")

        copy_edges = [c.edges(K) for x in nsols for c in copies_for_solution(K, x)]
        E = hitting_edge_set(copy_edges, strategy)
        rep.edge_set_size = len(E)
        rep.h_free = count_copies(K, removed=E, budget=budget, threads=threads) == 0
        rep.removed_normalized = pigeonhole_elements(E, F.q, k, m)
        pruned = apply_removals(ns.system, rep.removed_normalized)
        rep.normalized_solution_free = count_solutions(pruned, budget, threads) == 0
        if rep.h_free and not rep.normalized_solution_free:
            raise PipelineError("K - E' is H-free but a normalized solution survived")
        rep.removed_original = pull_back_removals(ns.transcript, rep.removed_normalized)

    final = apply_removals(s, rep.removed_original)
    rep.final_solutions = count_solutions(final, budget, threads)
    rep.original_solution_free = rep.final_solutions == 0
    return rep
