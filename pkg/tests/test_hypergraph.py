import itertools

import pytest

from linremoval.certificate import certify
from linremoval.enumerate import BudgetError
from linremoval.gf import FieldSpec
from linremoval.hypergraph import (
    BigHypergraph,
    CopyOfH,
    TemplateHypergraph,
    copies_for_solution,
    count_copies,
    edge_exists,
    edges_with,
    enumerate_copies,
    verify_copy_labels,
)
from linremoval.instances import random_normalized_system
from linremoval.removal import count_solutions, iter_solutions


@pytest.fixture
def worked_K(worked):
    cert, A2 = certify(worked.A)
    return A2, BigHypergraph.build(cert, worked.sets)


def test_template(worked):
    cert, _ = certify(worked.A)
    H = TemplateHypergraph.from_certificate(cert)
    assert H.edges == ((1, frozenset({1, 2})), (2, frozenset({2, 3})), (3, frozenset({1, 3})))


def test_edge_exists(worked_K):
    _, K = worked_K
    # C_1 = (-1, 1, 0): a1 = 1, a2 = 2 gives label 1
    assert edge_exists(K, 0, 1, {1: 1, 2: 2})
    assert not edge_exists(K, 0, 2, {1: 1, 2: 2})
    assert not edge_exists(K, 0, 3, {1: 1, 2: 4})  # 3 not in X_1
    with pytest.raises(ValueError):
        edge_exists(K, 0, 1, {1: 1, 3: 2})


def test_edges_per_label(worked_K):
    _, K = worked_K
    for i in range(3):
        for x in K.sets[i]:
            edges = list(edges_with(K, i, x))
            assert len(edges) == 5 == len(set(edges))
            assert all(K.label(i, e) == x for e in edges)
    assert K.edge_count() == 5 * 5


def test_copies_for_zero_solution(gf5, worked_K):
    _, K = worked_K
    K0 = K.with_sets([set(range(5))] * 3)
    cs = copies_for_solution(K0, (0, 0, 0))
    assert sorted(c.assignment for c in cs) == [(t, t, t) for t in range(5)]


def test_copies_for_non_solution(worked_K):
    _, K = worked_K
    with pytest.raises(ValueError):
        copies_for_solution(K, (1, 3, 0))


def test_count_copies_worked(worked_K):
    A2, K = worked_K
    assert count_copies(K) == 10
    assert count_copies(K.with_sets([set(range(5))] * 3)) == 125
    assert count_copies(K.with_sets([set()] * 3)) == 0
    copies = enumerate_copies(K)
    assert len(copies) == 10
    assert {c.labels for c in copies} == {(1, 3, 1), (2, 3, 0)}
    assert all(verify_copy_labels(A2, K, c) for c in copies)


def test_copy_labels_rejects_corrupted(worked_K):
    A2, K = worked_K
    c = enumerate_copies(K)[0]
    bad = CopyOfH(c.assignment, (c.labels[0], c.labels[1], (c.labels[2] + 1) % 5))
    assert not verify_copy_labels(A2, K, bad)


def test_budget_refusal(worked_K):
    _, K = worked_K
    with pytest.raises(BudgetError) as e:
        count_copies(K, budget=100)
    assert e.value.required == 125


def test_removed_edges(worked_K):
    _, K = worked_K
    x = (2, 3, 0)
    cs = copies_for_solution(K, x)
    everything = enumerate_copies(K)

    def survivors(removed):
        return sum(1 for c in everything if not set(c.edges(K)) & set(removed))

    # a color-1 edge is private to x; the color-2 edge is shared with (1, 3, 1)
    for removed in ([cs[0].edges(K)[0]], [cs[0].edges(K)[1]],
                    [e for c in cs for e in c.edges(K)]):
        assert count_copies(K, removed=removed) == survivors(removed)
    assert survivors([cs[0].edges(K)[0]]) == 9
    assert survivors([cs[0].edges(K)[1]]) == 8


@pytest.mark.parametrize("p,n,k,m,seed", [(3, 1, 1, 4, 0), (5, 1, 2, 5, 1), (2, 2, 2, 5, 2),
                                          (3, 2, 1, 4, 3), (7, 1, 2, 5, 4), (2, 1, 2, 6, 5)])
def test_counting_identity_and_disjointness(p, n, k, m, seed):
    F = FieldSpec(p, n)
    s = random_normalized_system(F, k, m, seed, density=0.5, planted=2)
    cert, A2 = certify(s.A)
    sets = [s.sets[c] for c in cert.trace.colperm]
    from linremoval.normalize import LinSystem

    s2 = LinSystem(F, A2, s.b, tuple(sets))
    K = BigHypergraph.build(cert, sets)
    sols = list(iter_solutions(s2))
    assert len(sols) == count_solutions(s2)
    assert count_copies(K) == F.q**k * len(sols)
    assert count_copies(K, threads=3) == count_copies(K)
    for x in sols:
        cs = copies_for_solution(K, x)
        assert len(cs) == F.q**k
        edge_lists = [c.edges(K) for c in cs]
        for a, b in itertools.combinations(edge_lists, 2):
            assert not set(a) & set(b)
        for i in range(m):
            owners = {}
            for n_, edges in enumerate(edge_lists):
                owners.setdefault(edges[i][2], []).append(n_)
            for vals in edges_with(K, i, x[i]):
                assert len(owners[vals]) == 1
        assert all(verify_copy_labels(A2, K, c) for c in cs)
