# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled enumeration kernel.

Same contract as quatlift._enum_py.count_by_value: counts of lattice
vectors by value of an integral quadratic form Q (passed as the even
Gram matrix of 2Q), dimensions 3 and 4.

Ranges at each recursion level come from a double-precision Cholesky
with a widening margin, and every candidate is accepted or rejected by
an exact int64 evaluation of Q, so float error can only cost a few
wasted candidates, never a wrong count.  Inputs large enough for the
margin argument to fail (beyond 2^38) are rejected with OverflowError
and the caller falls back to the exact Python backend.
"""

from libc.math cimport floor, sqrt
from libc.stdlib cimport free, malloc

cdef double EPS = 1e-6

LIMIT = 1 << 38


def count_by_value(g2, long long bound, long long max_nodes):
    cdef int n = len(g2)
    cdef long long G[4][4]
    cdef double q[4][4]
    cdef int i, j, l
    if n < 2 or n > 4:
        raise ValueError("kernel supports dimensions 2..4")
    if bound < 0:
        raise ValueError("bound must be >= 0")
    if bound > LIMIT:
        raise OverflowError("bound too large for the compiled kernel")
    for i in range(n):
        for j in range(n):
            v = g2[i][j]
            if v > LIMIT or v < -LIMIT:
                raise OverflowError("Gram entry too large for the compiled kernel")
            G[i][j] = v
            q[i][j] = <double> v / 2.0

    # in-place Cholesky q-decomposition of A = G/2
    for i in range(n):
        if q[i][i] <= 0:
            raise ValueError("form is not positive definite")
        for j in range(i + 1, n):
            for l in range(j, n):
                q[j][l] -= q[i][j] * q[i][l] / q[i][i]
        for j in range(i + 1, n):
            q[i][j] /= q[i][i]

    cdef long long * counts = <long long *> malloc((bound + 1) * sizeof(long long))
    if counts == NULL:
        raise MemoryError()
    for i in range(bound + 1):
        counts[i] = 0
    counts[0] = 1

    cdef long long nodes = 0
    cdef bint overflow = False
    try:
        if n == 4:
            nodes = _run4(G, q, bound, counts, max_nodes, &overflow)
        elif n == 3:
            nodes = _run3(G, q, bound, counts, max_nodes, &overflow)
        else:
            nodes = _run2(G, q, bound, counts, max_nodes, &overflow)
        if overflow:
            raise_budget(max_nodes)
        return [counts[i] for i in range(bound + 1)]
    finally:
        free(counts)


def raise_budget(max_nodes):
    from .errors import ResourceLimitError
    raise ResourceLimitError(f"enumeration exceeded {max_nodes} vectors")


cdef inline long lower(double c, double r, bint leading) nogil:
    cdef long lo = <long> floor(-c - r + 0.5) - 1
    if leading and lo < 0:
        lo = 0
    return lo


cdef inline long upper(double c, double r) nogil:
    return <long> floor(-c + r) + 1


cdef long long _run4(long long G[4][4], double q[4][4], long long bound,
                     long long * counts, long long max_nodes, bint * overflow) nogil:
    cdef double t3, t2, t1, t0, c2, c1, c0, r
    cdef long x3, x2, x1, x0, lo3, hi3, lo2, hi2, lo1, hi1, lo0, hi0
    cdef long long v2, nodes = 0
    cdef bint l3, l2, l1
    t3 = <double> bound + EPS
    r = sqrt(t3 / q[3][3]) + EPS
    lo3 = 0
    hi3 = upper(0, r)
    for x3 in range(lo3, hi3 + 1):
        l3 = x3 == 0
        t2 = t3 - q[3][3] * x3 * x3
        if t2 < -EPS:
            continue
        if t2 < 0:
            t2 = 0
        c2 = q[2][3] * x3
        r = sqrt(t2 / q[2][2]) + EPS
        lo2 = lower(c2, r, l3)
        hi2 = upper(c2, r)
        for x2 in range(lo2, hi2 + 1):
            l2 = l3 and x2 == 0
            t1 = t2 - q[2][2] * (x2 + c2) * (x2 + c2)
            if t1 < -EPS:
                continue
            if t1 < 0:
                t1 = 0
            c1 = q[1][2] * x2 + q[1][3] * x3
            r = sqrt(t1 / q[1][1]) + EPS
            lo1 = lower(c1, r, l2)
            hi1 = upper(c1, r)
            for x1 in range(lo1, hi1 + 1):
                l1 = l2 and x1 == 0
                t0 = t1 - q[1][1] * (x1 + c1) * (x1 + c1)
                if t0 < -EPS:
                    continue
                if t0 < 0:
                    t0 = 0
                c0 = q[0][1] * x1 + q[0][2] * x2 + q[0][3] * x3
                r = sqrt(t0 / q[0][0]) + EPS
                lo0 = lower(c0, r, l1)
                hi0 = upper(c0, r)
                for x0 in range(lo0, hi0 + 1):
                    if l1 and x0 == 0:
                        continue
                    v2 = (G[0][0] * x0 * x0 + G[1][1] * x1 * x1
                          + G[2][2] * x2 * x2 + G[3][3] * x3 * x3
                          + 2 * (G[0][1] * x0 * x1 + G[0][2] * x0 * x2
                                 + G[0][3] * x0 * x3 + G[1][2] * x1 * x2
                                 + G[1][3] * x1 * x3 + G[2][3] * x2 * x3))
                    if v2 >= 0 and v2 // 2 <= bound:
                        counts[v2 // 2] += 2
                    nodes += 1
                    if nodes > max_nodes:
                        overflow[0] = True
                        return nodes
    return nodes


cdef long long _run3(long long G[4][4], double q[4][4], long long bound,
                     long long * counts, long long max_nodes, bint * overflow) nogil:
    cdef double t2, t1, t0, c1, c0, r
    cdef long x2, x1, x0, hi2, lo1, hi1, lo0, hi0
    cdef long long v2, nodes = 0
    cdef bint l2, l1
    t2 = <double> bound + EPS
    r = sqrt(t2 / q[2][2]) + EPS
    hi2 = upper(0, r)
    for x2 in range(0, hi2 + 1):
        l2 = x2 == 0
        t1 = t2 - q[2][2] * x2 * x2
        if t1 < -EPS:
            continue
        if t1 < 0:
            t1 = 0
        c1 = q[1][2] * x2
        r = sqrt(t1 / q[1][1]) + EPS
        lo1 = lower(c1, r, l2)
        hi1 = upper(c1, r)
        for x1 in range(lo1, hi1 + 1):
            l1 = l2 and x1 == 0
            t0 = t1 - q[1][1] * (x1 + c1) * (x1 + c1)
            if t0 < -EPS:
                continue
            if t0 < 0:
                t0 = 0
            c0 = q[0][1] * x1 + q[0][2] * x2
            r = sqrt(t0 / q[0][0]) + EPS
            lo0 = lower(c0, r, l1)
            hi0 = upper(c0, r)
            for x0 in range(lo0, hi0 + 1):
                if l1 and x0 == 0:
                    continue
                v2 = (G[0][0] * x0 * x0 + G[1][1] * x1 * x1 + G[2][2] * x2 * x2
                      + 2 * (G[0][1] * x0 * x1 + G[0][2] * x0 * x2
                             + G[1][2] * x1 * x2))
                if v2 >= 0 and v2 // 2 <= bound:
                    counts[v2 // 2] += 2
                nodes += 1
                if nodes > max_nodes:
                    overflow[0] = True
                    return nodes
    return nodes


cdef long long _run2(long long G[4][4], double q[4][4], long long bound,
                     long long * counts, long long max_nodes, bint * overflow) nogil:
    cdef double t1, t0, c0, r
    cdef long x1, x0, hi1, lo0, hi0
    cdef long long v2, nodes = 0
    cdef bint l1
    t1 = <double> bound + EPS
    r = sqrt(t1 / q[1][1]) + EPS
    hi1 = upper(0, r)
    for x1 in range(0, hi1 + 1):
        l1 = x1 == 0
        t0 = t1 - q[1][1] * x1 * x1
        if t0 < -EPS:
            continue
        if t0 < 0:
            t0 = 0
        c0 = q[0][1] * x1
        r = sqrt(t0 / q[0][0]) + EPS
        lo0 = lower(c0, r, l1)
        hi0 = upper(c0, r)
        for x0 in range(lo0, hi0 + 1):
            if l1 and x0 == 0:
                continue
            v2 = G[0][0] * x0 * x0 + G[1][1] * x1 * x1 + 2 * G[0][1] * x0 * x1
            if v2 >= 0 and v2 // 2 <= bound:
                counts[v2 // 2] += 2
            nodes += 1
            if nodes > max_nodes:
                overflow[0] = True
                return nodes
    return nodes
