import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from linremoval.gf import FieldError, FieldSpec, field_make, is_irreducible

FIELDS = [FieldSpec(p, n) for p, n in [(2, 1), (3, 1), (5, 1), (7, 1), (2, 2), (2, 3), (3, 2),
                                        (2, 4), (5, 2), (2, 6)]]


def test_prime_field():
    F = field_make(5, 1)
    assert (F.p, F.n, F.q, F.modulus) == (5, 1, 5, ())


def test_gf4_default_modulus():
    # x^2, x^2+1, x^2+x all have a root in GF(2); x^2+x+1 has none
    roots = {}
    for c0, c1 in itertools.product(range(2), repeat=2):
        roots[(c0, c1)] = [r for r in range(2) if (r * r + c1 * r + c0) % 2 == 0]
    assert [k for k, v in roots.items() if not v] == [(1, 1)]
    assert field_make(2, 2).modulus == (1, 1, 1)


def test_gf9_default_modulus_is_smallest():
    assert FieldSpec(3, 2).modulus == (1, 0, 1)


@pytest.mark.parametrize("p", [4, 1, 0, 9])
def test_non_prime_rejected(p):
    with pytest.raises(FieldError):
        field_make(p, 1)


def test_reducible_modulus_rejected():
    with pytest.raises(FieldError):
        FieldSpec(2, 2, (0, 1, 1))  # x^2 + x = x(x+1)


def test_modulus_degree_mismatch():
    with pytest.raises(FieldError):
        FieldSpec(2, 3, (1, 1, 1))


def test_order_cap():
    with pytest.raises(FieldError):
        FieldSpec(2, 17)
    assert FieldSpec(2, 16).q == 65536


def test_examples(gf5):
    assert gf5.inv(2) == 3
    F4 = FieldSpec(2, 2)
    assert F4.mul(2, 2) == 3  # a * a = a + 1


def test_inv_zero(gf5):
    with pytest.raises(ZeroDivisionError):
        gf5.inv(0)
    with pytest.raises(ZeroDivisionError):
        FieldSpec(3, 2).inv(0)


def test_irreducibility_helper():
    assert is_irreducible([1, 1, 1], 2)
    assert not is_irreducible([1, 0, 1], 2)  # (x+1)^2
    assert is_irreducible([1, 2, 0, 1], 3)  # x^3 + 2x + 1 has no root mod 3
    assert not is_irreducible([2, 1, 0, 1], 3)  # x = 2 is a root of x^3 + x + 2


@pytest.mark.parametrize("F", FIELDS, ids=repr)
def test_field_axioms(F):
    elems = range(F.q) if F.q <= 16 else range(0, F.q, max(1, F.q // 16))
    for a in elems:
        assert F.add(a, F.neg(a)) == 0
        assert F.add(a, 0) == a and F.mul(a, 1) == a and F.mul(a, 0) == 0
        if a:
            assert F.mul(a, F.inv(a)) == 1
            assert F.pow(a, F.q - 1) == 1
        for b in elems:
            assert F.add(a, b) == F.add(b, a)
            assert F.mul(a, b) == F.mul(b, a)
            assert F.sub(F.add(a, b), b) == a
            for c in list(elems)[:6]:
                assert F.mul(a, F.add(b, c)) == F.add(F.mul(a, b), F.mul(a, c))
                assert F.mul(F.mul(a, b), c) == F.mul(a, F.mul(b, c))
                assert F.add(F.add(a, b), c) == F.add(a, F.add(b, c))


@pytest.mark.parametrize("F", FIELDS, ids=repr)
def test_mul_matches_polynomial_product(F):
    for a in range(min(F.q, 20)):
        for b in range(min(F.q, 20)):
            assert F.mul(a, b) == F._slow_mul(a, b) if F.n > 1 else F.mul(a, b) == a * b % F.p


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(FIELDS), st.data())
def test_axioms_random(F, data):
    a, b, c = (data.draw(st.integers(0, F.q - 1)) for _ in range(3))
    assert F.mul(a, F.add(b, c)) == F.add(F.mul(a, b), F.mul(a, c))
    assert F.mul(F.mul(a, b), c) == F.mul(a, F.mul(b, c))
    assert F.pow(a, 3) == F.mul(a, F.mul(a, a))
    if a:
        assert F.div(b, a) == F.mul(b, F.inv(a))
        assert F.pow(a, -1) == F.inv(a)


@pytest.mark.parametrize("F", FIELDS, ids=repr)
def test_encoding_roundtrip(F):
    for v in range(F.q):
        ds = F.digits(v)
        assert len(ds) == F.n and all(0 <= d < F.p for d in ds)
        assert F.from_digits(ds) == v


@pytest.mark.parametrize("F", FIELDS, ids=repr)
def test_vectorized_ops_match_scalar(F):
    rng = np.random.default_rng(0)
    a = rng.integers(0, F.q, 200)
    b = rng.integers(0, F.q, 200)
    c = int(rng.integers(0, F.q))
    assert list(F.add_array(a, b)) == [F.add(int(x), int(y)) for x, y in zip(a, b)]
    assert list(F.mul_array(a, b)) == [F.mul(int(x), int(y)) for x, y in zip(a, b)]
    assert list(F.neg_array(a)) == [F.neg(int(x)) for x in a]
    assert list(F.scale_array(c, a)) == [F.mul(c, int(x)) for x in a]


def test_spec_equality_and_hash():
    assert FieldSpec(2, 2) == FieldSpec(2, 2, (1, 1, 1))
    assert hash(FieldSpec(5)) == hash(FieldSpec(5))
    assert FieldSpec(5) != FieldSpec(7)
