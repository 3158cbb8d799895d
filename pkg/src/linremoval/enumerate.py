"""Chunked vectorized enumeration of F^d in odometer order.

Assignment number n maps to digits (a_0, ..., a_{d-1}) with a_0 most
significant.  Work is split into contiguous chunks so memory stays bounded
and chunks can be farmed out to a thread pool; counts are exact integer
sums and do not depend on the thread count.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .gf import FieldSpec

DEFAULT_BUDGET = 10**8
CHUNK = 1 << 18


class BudgetError(RuntimeError):
    def __init__(self, what: str, required: int, limit: int):
        super().__init__(f"{what} needs {required} evaluations, budget is {limit}")
        self.what = what
        self.required = required
        self.limit = limit


def check_budget(what: str, required: int, budget: int | None) -> None:
    limit = DEFAULT_BUDGET if budget is None else budget
    if required > limit:
        raise BudgetError(what, required, limit)


def digits(q: int, d: int, start: int, stop: int) -> np.ndarray:
    """(d, stop - start) array of assignment digits."""
    idx = np.arange(start, stop, dtype=np.int64)
    out = np.empty((d, idx.size), dtype=np.int64)
    for j in range(d - 1, -1, -1):
        idx, out[j] = np.divmod(idx, q)
    return out


def linear_form(F: FieldSpec, coeffs, values) -> np.ndarray:
    """sum_j c_j * values[j] over F; coeffs is a list of (j, c)."""
    if F.n == 1:
        acc = np.zeros(values.shape[1], dtype=np.int64)
        for j, c in coeffs:
            if c:
                acc += c * values[j]
        return acc % F.p
    acc = np.zeros(values.shape[1], dtype=np.int64)
    for j, c in coeffs:
        if c:
            acc = F.add_array(acc, F.scale_array(c, values[j]))
    return acc


def membership(F: FieldSpec, s) -> np.ndarray:
    table = np.zeros(F.q, dtype=bool)
    table[list(s)] = True
    return table


def chunked_sum(fn, total: int, threads: int = 1, chunk: int = CHUNK) -> int:
    bounds = [(a, min(total, a + chunk)) for a in range(0, total, chunk)]
    if threads <= 1 or len(bounds) <= 1:
        return sum(fn(a, b) for a, b in bounds)
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return sum(pool.map(lambda ab: fn(*ab), bounds))
