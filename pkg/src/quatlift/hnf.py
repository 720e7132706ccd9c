"""Exact integer Hermite normal form, lower-triangular convention.

The canonical basis of a rank-4 lattice is the unique matrix H with
H lower triangular, positive diagonal, and 0 <= H[i][j] < H[j][j] for
i > j.  Rows are basis vectors over (1, i, j, k); with this convention
the bases printed in the usual subideal tables are already canonical.

``left_kernel`` gives an integer basis of {t : t*A = 0}, used by the
lattice layer to solve integrality conditions exactly.
"""

from __future__ import annotations

from .errors import ConsistencyError

Matrix = list[list[int]]


def hnf_lower(rows: Matrix, ncols: int = 4) -> tuple[tuple[int, ...], ...]:
    """Canonical lower-triangular HNF of the row span; requires full rank."""
    work = [list(r) for r in rows if any(r)]
    out: list[list[int] | None] = [None] * ncols
    for c in range(ncols - 1, -1, -1):
        # gcd all rows still having support in column c down to one pivot row
        live = [r for r in work if r[c] != 0]
        rest = [r for r in work if r[c] == 0]
        # Euclidean passes terminate: every surviving non-pivot row gets
        # |entry| < |pivot entry|, so min|entry| strictly decreases
        while len(live) > 1:
            live.sort(key=lambda r: abs(r[c]))
            piv = live[0]
            new_live = [piv]
            for r in live[1:]:
                q = r[c] // piv[c]
                rr = [x - q * y for x, y in zip(r, piv)]
                (new_live if rr[c] != 0 else rest).append(rr)
            live = new_live
        if not live:
            raise ConsistencyError(f"rank deficient at column {c}")
        out[c] = live[0]
        work = rest
    h = [list(r) for r in out]  # type: ignore[union-attr]
    for i in range(ncols):
        if h[i][i] < 0:
            h[i] = [-x for x in h[i]]
        for j in range(i - 1, -1, -1):
            q = h[i][j] // h[j][j]
            if q:
                h[i] = [x - q * y for x, y in zip(h[i], h[j])]
    return tuple(tuple(r) for r in h)


def left_kernel(rows: Matrix, ncols: int) -> list[list[int]]:
    """Integer basis of the left kernel {t : t * A = 0} of an m x ncols matrix."""
    m = len(rows)
    work = [list(r) for r in rows]
    u = [[1 if i == j else 0 for j in range(m)] for i in range(m)]
    rank_rows: list[int] = []
    free = list(range(m))
    for c in range(ncols):
        live = [i for i in free if work[i][c] != 0]
        if not live:
            continue
        while len(live) > 1:
            live.sort(key=lambda i: abs(work[i][c]))
            p = live[0]
            nxt = [p]
            for i in live[1:]:
                q = work[i][c] // work[p][c]
                work[i] = [x - q * y for x, y in zip(work[i], work[p])]
                u[i] = [x - q * y for x, y in zip(u[i], u[p])]
                if work[i][c] != 0:
                    nxt.append(i)
            live = nxt
        pivot = live[0]
        rank_rows.append(pivot)
        free.remove(pivot)
    return [u[i] for i in free if not any(work[i])]


def det_lower(h) -> int:
    return_val = 1
    for i in range(len(h)):
        return_val *= h[i][i]
    return return_val
