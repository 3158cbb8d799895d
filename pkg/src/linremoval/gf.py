"""Exact arithmetic in finite fields GF(p^n).

Elements are plain integers in [0, q).  The integer v encodes the
polynomial d_0 + d_1 a + ... + d_{n-1} a^{n-1} where d_t are the base-p
digits of v and a is a root of the field modulus.  Elements carry no
reference to their field; every operation goes through a FieldSpec.

Moduli are stored as ascending coefficient tuples (c_0, ..., c_n) with
c_n = 1.  The default modulus for n > 1 is the monic irreducible of
degree n whose lower coefficients, read as a base-p integer, are smallest.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

MAX_ORDER = 1 << 16


class FieldError(ValueError):
    """Invalid field parameters or cross-field use."""


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p % 2 == 0:
        return p == 2
    d = 3
    while d * d <= p:
        if p % d == 0:
            return False
        d += 2
    return True


# -- polynomials over GF(p), ascending coefficient lists ---------------------

def _poly_trim(a):
    a = list(a)
    while a and a[-1] == 0:
        a.pop()
    return a


def _poly_mod(a, b, p):
    """Remainder of a modulo b over GF(p); b nonzero."""
    a = _poly_trim(a)
    b = _poly_trim(b)
    lead_inv = pow(b[-1], p - 2, p)
    while len(a) >= len(b):
        coef = a[-1] * lead_inv % p
        shift = len(a) - len(b)
        for t, bt in enumerate(b):
            a[shift + t] = (a[shift + t] - coef * bt) % p
        a = _poly_trim(a)
    return a


def _monic_polys(p, degree):
    for low in itertools.product(range(p), repeat=degree):
        yield list(low) + [1]


def is_irreducible(poly, p: int) -> bool:
    """Trial division by every monic polynomial of degree <= deg/2."""
    poly = _poly_trim(poly)
    deg = len(poly) - 1
    if deg < 1:
        return False
    if deg == 1:
        return True
    for d in range(1, deg // 2 + 1):
        for cand in _monic_polys(p, d):
            if not _poly_mod(poly, cand, p):
                return False
    return True


def smallest_irreducible(p: int, n: int) -> tuple[int, ...]:
    # itertools.product over reversed digits gives base-p integer order of
    # the lower coefficients
    for digits in itertools.product(range(p), repeat=n):
        poly = list(reversed(digits)) + [1]
        if is_irreducible(poly, p):
            return tuple(poly)
    raise FieldError(f"no irreducible polynomial of degree {n} over GF({p})")


# -- field spec ---------------------------------------------------------------

@dataclass(frozen=True)
class FieldSpec:
    """The field GF(p^n).  Immutable; arithmetic tables are built lazily."""

    p: int
    n: int = 1
    modulus: tuple[int, ...] = ()
    q: int = field(init=False, compare=False)

    def __post_init__(self):
        p, n = self.p, self.n
        if not isinstance(p, int) or not is_prime(p):
            raise FieldError(f"{p} is not prime")
        if not isinstance(n, int) or n < 1:
            raise FieldError(f"extension degree must be >= 1, got {n}")
        q = p**n
        if q > MAX_ORDER:
            raise FieldError(f"field order {q} exceeds the supported cap {MAX_ORDER}")
        object.__setattr__(self, "q", q)
        mod = tuple(int(c) for c in self.modulus)
        if n == 1:
            if mod and mod != (0, 1):
                raise FieldError("prime fields take no modulus")
            mod = ()
        else:
            if not mod:
                mod = smallest_irreducible(p, n)
            if len(mod) != n + 1:
                raise FieldError(f"modulus must have degree {n} ({n + 1} coefficients)")
            if any(not 0 <= c < p for c in mod):
                raise FieldError("modulus coefficients must lie in [0, p)")
            if mod[-1] != 1:
                raise FieldError("modulus must be monic")
            if not is_irreducible(mod, p):
                raise FieldError(f"modulus {mod} is reducible over GF({p})")
        object.__setattr__(self, "modulus", mod)

    def __repr__(self):
        if self.n == 1:
            return f"GF({self.p})"
        return f"GF({self.p}^{self.n}, modulus={list(self.modulus)})"

    # -- encoding ---------------------------------------------------------

    def digits(self, a: int) -> list[int]:
        """Polynomial coefficients (d_0, ..., d_{n-1}) of element a."""
        out = []
        for _ in range(self.n):
            a, d = divmod(a, self.p)
            out.append(d)
        return out

    def from_digits(self, ds) -> int:
        v = 0
        for d in reversed(list(ds)):
            v = v * self.p + int(d) % self.p
        return v

    def element(self, v: int) -> int:
        """Reduce an integer coefficient into the prime subfield / validate."""
        if self.n == 1:
            return int(v) % self.p
        v = int(v)
        if not 0 <= v < self.q:
            raise FieldError(f"{v} is not an element of {self!r}")
        return v

    def check(self, a: int) -> int:
        if not (isinstance(a, (int, np.integer)) and 0 <= a < self.q):
            raise FieldError(f"{a!r} is not an element of {self!r}")
        return int(a)

    def elements(self) -> range:
        return range(self.q)

    # -- tables -----------------------------------------------------------

    def _slow_mul(self, a: int, b: int) -> int:
        p, n = self.p, self.n
        da, db = self.digits(a), self.digits(b)
        prod = [0] * (2 * n - 1)
        for i, x in enumerate(da):
            if x:
                for j, y in enumerate(db):
                    prod[i + j] = (prod[i + j] + x * y) % p
        return self.from_digits(_poly_mod(prod, self.modulus, p) + [0] * n)

    @cached_property
    def _log_exp(self):
        """(log, exp) tables for a primitive element; exp has length 2(q-1)."""
        q = self.q
        if q == 2:
            exp = np.array([1, 1], dtype=np.int64)
            log = np.zeros(2, dtype=np.int64)
            return log, exp
        order = q - 1
        prime_factors = [d for d in range(2, order + 1) if order % d == 0 and is_prime(d)]
        mul = self._slow_mul if self.n > 1 else (lambda a, b: a * b % self.p)
        for g in range(2, q):
            powers = [1]
            for _ in range(order - 1):
                powers.append(mul(powers[-1], g))
            if len(set(powers)) == order and all(
                powers[order // r] != 1 for r in prime_factors
            ):
                break
        else:  # pragma: no cover - every finite field has a primitive element
            raise FieldError("no primitive element found")
        exp = np.array(powers + powers, dtype=np.int64)
        log = np.zeros(q, dtype=np.int64)
        log[exp[:order]] = np.arange(order)
        return log, exp

    @cached_property
    def _neg_table(self) -> np.ndarray:
        a = np.arange(self.q, dtype=np.int64)
        return self.neg_array(a) if self.n > 1 else (-a) % self.p

    @cached_property
    def _inv_table(self) -> np.ndarray:
        log, exp = self._log_exp
        out = np.zeros(self.q, dtype=np.int64)
        nz = np.arange(1, self.q)
        out[nz] = exp[(-log[nz]) % (self.q - 1)]
        return out

    # -- scalar operations ------------------------------------------------

    def add(self, a: int, b: int) -> int:
        if self.n == 1:
            return (a + b) % self.p
        if self.p == 2:
            return a ^ b
        return self.from_digits(x + y for x, y in zip(self.digits(a), self.digits(b)))

    def neg(self, a: int) -> int:
        if self.n == 1:
            return -a % self.p
        return int(self._neg_table[a])

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if self.n == 1:
            return a * b % self.p
        if a == 0 or b == 0:
            return 0
        log, exp = self._log_exp
        return int(exp[log[a] + log[b]])

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError(f"0 has no inverse in {self!r}")
        if self.n == 1:
            return pow(int(a), self.p - 2, self.p)
        return int(self._inv_table[a])

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, e: int) -> int:
        e = int(e)
        if a == 0:
            if e < 0:
                raise ZeroDivisionError(f"0 has no inverse in {self!r}")
            return 1 if e == 0 else 0
        if self.n == 1:
            return pow(int(a), e % (self.p - 1), self.p)
        log, exp = self._log_exp
        return int(exp[(int(log[a]) * e) % (self.q - 1)])

    # -- vectorized operations on integer arrays ---------------------------

    def add_array(self, a, b) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if self.n == 1:
            return (a + b) % self.p
        if self.p == 2:
            return a ^ b
        out = np.zeros(np.broadcast_shapes(a.shape, b.shape), dtype=np.int64)
        scale = 1
        for _ in range(self.n):
            out += ((a // scale + b // scale) % self.p) * scale
            scale *= self.p
        return out

    def neg_array(self, a) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        if self.n == 1:
            return (-a) % self.p
        if self.p == 2:
            return a.copy()
        out = np.zeros_like(a)
        scale = 1
        for _ in range(self.n):
            out += ((-(a // scale)) % self.p) * scale
            scale *= self.p
        return out

    def scale_array(self, c: int, a) -> np.ndarray:
        """Multiply every entry of a by the scalar c."""
        a = np.asarray(a, dtype=np.int64)
        if self.n == 1:
            return (c * a) % self.p
        if c == 0:
            return np.zeros_like(a)
        log, exp = self._log_exp
        return np.where(a == 0, 0, exp[log[a] + log[c]])

    def mul_array(self, a, b) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if self.n == 1:
            return (a * b) % self.p
        log, exp = self._log_exp
        return np.where((a == 0) | (b == 0), 0, exp[log[a] + log[b]])


def field_make(p: int, n: int = 1, modulus=None) -> FieldSpec:
    return FieldSpec(p, n, tuple(modulus) if modulus else ())
