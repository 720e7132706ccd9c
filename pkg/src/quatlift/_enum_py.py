"""Exact pure-Python vector enumeration (fallback backend).

Counts lattice vectors by quadratic-form value with Fincke-Pohst style
nested bounds.  The Cholesky data is kept as Fractions and the integer
ranges at each level are derived with exact floor/sqrt arithmetic, so
the counts are provably correct; the compiled backend must agree with
this one bit-for-bit (a test asserts it).

Forms are passed as the even Gram matrix G of 2Q: Q(x) = x^T G x / 2,
with G integral and even on the diagonal.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterator

from .arith import floor_plus_sqrt
from .errors import ResourceLimitError

DEFAULT_MAX_NODES = 200_000_000


def _cholesky(g2) -> list[list[Fraction]]:
    """q-decomposition: Q(x) = sum_i q[i][i] * (x_i + sum_{j>i} q[i][j] x_j)^2."""
    n = len(g2)
    q = [[Fraction(g2[i][j], 2) for j in range(n)] for i in range(n)]
    for i in range(n):
        piv = q[i][i]
        if piv <= 0:
            raise ValueError("form is not positive definite")
        for j in range(i + 1, n):
            for l in range(j, n):
                q[j][l] -= q[i][j] * q[i][l] / piv
        for j in range(i + 1, n):
            q[i][j] /= piv
    return q


def _range_at(q, i: int, center: Fraction, budget: Fraction) -> tuple[int, int]:
    if budget < 0:
        return 1, 0
    r = budget / q[i][i]
    hi = floor_plus_sqrt(-center, r)
    lo = -floor_plus_sqrt(center, r)
    return lo, hi


def count_by_value(g2, bound: int, max_nodes: int = DEFAULT_MAX_NODES) -> list[int]:
    """counts[m] = #{x in Z^n : Q(x) = m} for 0 <= m <= bound, exact."""
    if bound < 0:
        raise ValueError("bound must be >= 0")
    counts = [0] * (bound + 1)
    counts[0] = 1
    if bound == 0:
        return counts
    nodes = 0
    for _, val in half_vectors(g2, bound):
        counts[val] += 2
        nodes += 1
        if nodes > max_nodes:
            raise ResourceLimitError(f"enumeration exceeded {max_nodes} vectors")
    return counts


def half_vectors(g2, bound: int) -> Iterator[tuple[tuple[int, ...], int]]:
    """Yield (x, Q(x)) over nonzero vectors with Q <= bound, one per +-pair.

    The representative of each pair has positive highest-index nonzero
    coordinate.  Order is deterministic (top level outermost, each range
    ascending), which callers rely on for reproducible searches.
    """
    n = len(g2)
    q = _cholesky(g2)
    x = [0] * n

    def descend(i: int, budget: Fraction, acc: Fraction, leading: bool):
        center = sum((q[i][j] * x[j] for j in range(i + 1, n)), Fraction(0))
        lo, hi = _range_at(q, i, center, budget)
        if leading:
            lo = max(lo, 0)
        for xi in range(lo, hi + 1):
            x[i] = xi
            still_leading = leading and xi == 0
            term = q[i][i] * (xi + center) ** 2
            if i == 0:
                if still_leading:
                    continue  # zero vector
                val = acc + term
                if val.denominator != 1:
                    raise AssertionError("form value not integral")  # pragma: no cover
                v = int(val)
                if v <= bound:
                    yield tuple(x), v
            else:
                yield from descend(i - 1, budget - term, acc + term, still_leading)
        x[i] = 0

    yield from descend(n - 1, Fraction(bound), Fraction(0), True)
