"""Exact rank-4 lattice algebra in a definite quaternion algebra.

A ``Lattice`` is stored canonically: one positive denominator plus a
4x4 integer basis matrix in lower-triangular Hermite normal form (rows
are basis vectors over (1, i, j, k), entries below each pivot reduced
into [0, pivot)).  Two constructions of the same Z-span compare equal
bitwise, which is what makes golden-data tests and deduplication work.

Conventions fixed here once and used everywhere:

* norm N(a) = gcd of reduced norms of lattice elements, computed from
  the diagonal values and the polarized cross terms (exact, no
  sampling);
* the normalized quadratic form on a is N(x)/N(a); its even Gram
  matrix G (G[r][s] = tr(b_r conj(b_s)) / N(a)) is integral with even
  diagonal, and the form determinant is det(G/2);
* disc(a) = the positive square root of that determinant, an integer.

Side orders are solved from the integrality conditions by exact
integer kernel computation, not from the conjugate-product formula, so
the identity a * inverse(a) = left order stays an independent check on
local principality.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import cached_property

from .arith import qgcd, sqrt_exact
from .enumeration import DEFAULT_MAX_NODES, count_by_value, half_vectors
from .errors import ConsistencyError, ConstructionError
from .hnf import hnf_lower, left_kernel
from .quaternion import Coords, QuatElement, QuaternionAlgebra

FR0 = Fraction(0)


def _frac_rows(rows) -> list[list[Fraction]]:
    out = []
    for r in rows:
        if isinstance(r, QuatElement):
            out.append(list(r.coords()))
        else:
            out.append([Fraction(c) for c in r])
    return out


class Lattice:
    """Full-rank lattice in H, canonical HNF basis over one denominator."""

    def __init__(self, algebra: QuaternionAlgebra, den: int, mat: tuple[tuple[int, ...], ...]):
        self.algebra = algebra
        self.den = den
        self.mat = mat

    @classmethod
    def from_rows(cls, algebra: QuaternionAlgebra, rows) -> "Lattice":
        """Canonical lattice spanned by the given coordinate rows/elements."""
        frows = _frac_rows(rows)
        den = 1
        for r in frows:
            for c in r:
                den = den * c.denominator // math.gcd(den, c.denominator)
        int_rows = [[int(c * den) for c in r] for r in frows]
        mat = hnf_lower(int_rows)
        g = den
        for row in mat:
            for v in row:
                g = math.gcd(g, v)
        if g > 1:
            mat = tuple(tuple(v // g for v in row) for row in mat)
            den //= g
        return cls(algebra, den, mat)

    # -- identity ------------------------------------------------------

    def key(self) -> tuple:
        return (self.den, self.mat)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Lattice)
            and self.algebra == other.algebra
            and self.den == other.den
            and self.mat == other.mat
        )

    def __hash__(self) -> int:
        return hash((self.algebra, self.den, self.mat))

    def __repr__(self) -> str:
        return f"Lattice(den={self.den}, mat={self.mat})"

    # -- basic geometry --------------------------------------------------

    def basis(self) -> tuple[QuatElement, ...]:
        return tuple(
            QuatElement(self.algebra, row, self.den) for row in self.mat
        )

    def coords_rows(self) -> list[list[Fraction]]:
        return [[Fraction(v, self.den) for v in row] for row in self.mat]

    def coords_of(self, x: QuatElement) -> tuple[Fraction, ...] | None:
        """Coefficients of x over the basis, or None if x is not in the lattice
        (rational coefficients are reported too; integrality means membership)."""
        y = [c * self.den for c in x.coords()]
        t = [FR0] * 4
        for i in range(3, -1, -1):
            ti = Fraction(y[i], self.mat[i][i])
            t[i] = ti
            if ti:
                for j in range(i + 1):
                    y[j] -= ti * self.mat[i][j]
        return tuple(t)

    def __contains__(self, x: QuatElement) -> bool:
        return all(c.denominator == 1 for c in self.coords_of(x))

    def contains_lattice(self, other: "Lattice") -> bool:
        return all(b in self for b in other.basis())

    def index_in(self, larger: "Lattice") -> int:
        """[larger : self], assuming containment."""
        r = self.covolume() / larger.covolume()
        if r.denominator != 1:
            raise ConsistencyError("index of non-sublattice requested")
        return int(r)

    def covolume(self) -> Fraction:
        d = 1
        for i in range(4):
            d *= self.mat[i][i]
        return Fraction(d, self.den**4)

    # -- algebra ---------------------------------------------------------

    def scale(self, r) -> "Lattice":
        r = Fraction(r)
        if r == 0:
            raise ValueError("cannot scale a lattice by zero")
        return Lattice.from_rows(
            self.algebra,
            [[c * r for c in row] for row in self.coords_rows()],
        )

    def __add__(self, other: "Lattice") -> "Lattice":
        if self.algebra != other.algebra:
            raise ValueError("lattices of different algebras")
        return Lattice.from_rows(self.algebra, self.coords_rows() + other.coords_rows())

    def __mul__(self, other):
        if isinstance(other, Lattice):
            if self.algebra != other.algebra:
                raise ValueError("lattices of different algebras")
            rows = [x * y for x in self.basis() for y in other.basis()]
            return Lattice.from_rows(self.algebra, rows)
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def conj(self) -> "Lattice":
        return Lattice.from_rows(self.algebra, [b.conj() for b in self.basis()])

    def multiply_element(self, x: QuatElement, side: str = "right") -> "Lattice":
        """a*x (side='right') or x*a (side='left')."""
        if side == "right":
            rows = [b * x for b in self.basis()]
        else:
            rows = [x * b for b in self.basis()]
        return Lattice.from_rows(self.algebra, rows)

    # -- norm, Gram, disc --------------------------------------------------

    @cached_property
    def norm(self) -> Fraction:
        b = self.basis()
        vals = [x.norm() for x in b]
        vals += [(b[i] * b[j].conj()).trace() for i in range(4) for j in range(i + 1, 4)]
        return qgcd(vals)

    @cached_property
    def gram2(self) -> tuple[tuple[int, ...], ...]:
        """Even Gram matrix of twice the normalized form: entries
        tr(b_r conj(b_s))/N(a); integral with even diagonal."""
        b = self.basis()
        n = self.norm
        g = [[(b[r] * b[s].conj()).trace() / n for s in range(4)] for r in range(4)]
        for r in range(4):
            for s in range(4):
                if g[r][s].denominator != 1:
                    raise ConsistencyError("normalized Gram is not integral")
            if g[r][r] % 2:
                raise ConsistencyError("normalized Gram diagonal is not even")
        return tuple(tuple(int(v) for v in row) for row in g)

    @cached_property
    def disc(self) -> int:
        # reduced-discriminant convention: disc^2 = det(tr(b_r conj(b_s)) / N),
        # the determinant of the even Gram matrix; for a maximal order this
        # gives disc = p, which pins the convention
        det = _det4_int(self.gram2)
        root = sqrt_exact(Fraction(det))  # raises if not a perfect square
        if root.denominator != 1:
            raise ConsistencyError("disc is not an integer")
        return int(root)

    # -- enumeration ---------------------------------------------------

    def theta_counts(self, bound: int, max_nodes: int = DEFAULT_MAX_NODES) -> list[int]:
        """r_m = #{x in a : N(x) = m N(a)} for m = 0..bound."""
        return count_by_value(self.gram2, bound, max_nodes)

    def short_elements(self, bound: int):
        """(x, m) with N(x) = m N(a) <= bound N(a); one of each +-pair, x != 0."""
        basis = self.basis()
        for vec, val in half_vectors(self.gram2, bound):
            x = None
            for c, b in zip(vec, basis):
                if c:
                    x = b * c if x is None else x + b * c
            yield x, val

    # -- duals and side orders ---------------------------------------------

    def dual(self) -> "Lattice":
        """{x : tr(x a) in Z}, via inversion of the trace pairing."""
        b = self.basis()
        p = [[(b[r] * b[s]).trace() for s in range(4)] for r in range(4)]
        pinv = _mat_inv_frac(p)
        rows = [
            [
                sum(pinv[r][k] * Fraction(self.mat[k][c], self.den) for k in range(4))
                for c in range(4)
            ]
            for r in range(4)
        ]
        return Lattice.from_rows(self.algebra, rows)

    def right_order(self) -> "Order":
        return self._side_order("right")

    def left_order(self) -> "Order":
        return self._side_order("left")

    def _side_order(self, side: str) -> "Order":
        b = self.basis()
        b1 = b[0]
        b1_inv = b1.conj() * (1 / b1.norm())
        if side == "right":
            # {x : a x <= a}; conditions b_r * x in a; x in b1^{-1} a
            mults = [("left", br) for br in b]
            ambient = self.multiply_element(b1_inv, side="left")
        else:
            mults = [("right", br) for br in b]
            ambient = self.multiply_element(b1_inv, side="right")
        sol = transporter(mults, self, ambient)
        return Order.from_lattice(sol)

    def inverse(self) -> "Lattice":
        """Conjugate scaled by 1/N(a); inverts locally principal ideals."""
        return self.conj().scale(1 / self.norm)


def _det4_int(m) -> int:
    total = 0
    # 4x4 determinant by cofactor expansion on the first row
    for c0 in range(4):
        sub = [[m[r][c] for c in range(4) if c != c0] for r in (1, 2, 3)]
        det3 = (
            sub[0][0] * (sub[1][1] * sub[2][2] - sub[1][2] * sub[2][1])
            - sub[0][1] * (sub[1][0] * sub[2][2] - sub[1][2] * sub[2][0])
            + sub[0][2] * (sub[1][0] * sub[2][1] - sub[1][1] * sub[2][0])
        )
        total += (-1) ** c0 * m[0][c0] * det3
    return total


def _mat_inv_frac(m) -> list[list[Fraction]]:
    n = len(m)
    a = [[Fraction(m[r][c]) for c in range(n)] + [Fraction(int(r == c)) for c in range(n)] for r in range(n)]
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col]), None)
        if piv is None:
            raise ConsistencyError("singular matrix")
        a[col], a[piv] = a[piv], a[col]
        pv = a[col][col]
        a[col] = [v / pv for v in a[col]]
        for r in range(n):
            if r != col and a[r][col]:
                f = a[r][col]
                a[r] = [v - f * w for v, w in zip(a[r], a[col])]
    return [row[n:] for row in a]


def transporter(mults, target: Lattice, ambient: Lattice) -> Lattice:
    """{x in ambient : m*x in target (or x*m) for each tagged multiplier}.

    Solved exactly: parametrize x over the ambient basis, express every
    condition as an integer congruence, and read the solution off the
    left kernel of the stacked system.
    """
    alg = target.algebra
    w = ambient.coords_rows()  # x = t . W
    binv = _mat_inv_frac([[Fraction(v, target.den) for v in row] for row in target.mat])
    cols: list[list[Fraction]] = [[] for _ in range(4)]
    for side, m in mults:
        mm = _mult_matrix(alg, m, side)
        # condition: (t W) M B^{-1} integral
        c = _mat_mul_frac(_mat_mul_frac(w, mm), binv)
        for r in range(4):
            cols[r].extend(c[r])
    den = 1
    for r in range(4):
        for v in cols[r]:
            den = den * v.denominator // math.gcd(den, v.denominator)
    ncond = len(cols[0])
    stacked = [[int(v * den) for v in cols[r]] for r in range(4)]
    stacked += [[den if c == r else 0 for c in range(ncond)] for r in range(ncond)]
    kernel = left_kernel(stacked, ncond)
    t_rows = [k[:4] for k in kernel]
    if len(t_rows) != 4:
        raise ConsistencyError("transporter solution is not full rank")
    rows = [
        [sum(Fraction(t[i]) * w[i][c] for i in range(4)) for c in range(4)]
        for t in t_rows
    ]
    return Lattice.from_rows(alg, rows)


def _mult_matrix(alg: QuaternionAlgebra, m: QuatElement, side: str):
    """Matrix of x -> m*x (side='left') or x -> x*m (side='right') on coords."""
    rows = []
    for e in alg.basis():
        y = m * e if side == "left" else e * m
        rows.append(list(y.coords()))
    return rows


def _mat_mul_frac(a, b):
    n, k, m = len(a), len(b), len(b[0])
    return [
        [sum(a[r][t] * b[t][c] for t in range(k)) for c in range(m)]
        for r in range(n)
    ]


class Order(Lattice):
    """A lattice that is a ring with 1 and integral elements."""

    @classmethod
    def from_lattice(cls, lat: Lattice, validate: bool = True) -> "Order":
        o = cls(lat.algebra, lat.den, lat.mat)
        if validate:
            o.validate()
        return o

    def validate(self) -> None:
        if self.algebra.one() not in self:
            raise ConsistencyError("order does not contain 1")
        b = self.basis()
        for x in b:
            if not x.is_integral():
                raise ConsistencyError("order basis element is not integral")
        for x in b:
            for y in b:
                if x * y not in self:
                    raise ConsistencyError("order is not closed under multiplication")

    @cached_property
    def omega(self) -> int:
        """gcd of char-poly discriminants over the order."""
        b = self.basis()
        vals = [abs(x.delta()) for x in b]
        vals += [
            abs((x + y).delta() - x.delta() - y.delta())
            for i, x in enumerate(b)
            for y in b[i + 1 :]
        ]
        g = qgcd(vals)
        if g.denominator != 1:
            raise ConsistencyError("omega is not an integer")
        return int(g)

    @cached_property
    def twolevel(self) -> int:
        """n(O) = 1/N(dual): the weight-2 level attached to the order."""
        n = 1 / self.dual().norm
        if n.denominator != 1 or n <= 0:
            raise ConsistencyError("n(O) came out non-integral")
        return int(n)

    def unit_count(self) -> int:
        return self.theta_counts(1)[1]

    def unit_elements(self) -> list[QuatElement]:
        units = []
        for x, val in self.short_elements(1):
            if val == 1:
                units.extend([x, -x])
        return units


def dual_twolevel(order: Order) -> tuple[Lattice, int]:
    return order.dual(), order.twolevel


class LeftIdeal:
    """A left ideal of an order, locally principal by construction."""

    def __init__(self, lattice: Lattice, left_order: Order, provenance: str = "direct", validate: bool = True):
        self.lattice = lattice
        self.order = left_order
        self.provenance = provenance
        if validate and not all(
            u * b in lattice for u in left_order.basis() for b in lattice.basis()
        ):
            raise ConsistencyError("lattice is not stable under its left order")

    def key(self) -> tuple:
        return self.lattice.key()

    def __eq__(self, other) -> bool:
        return isinstance(other, LeftIdeal) and self.lattice == other.lattice and self.order == other.order

    def __hash__(self) -> int:
        return hash((self.lattice, self.order))

    def __repr__(self) -> str:
        return f"LeftIdeal({self.lattice!r})"

    @property
    def norm(self) -> Fraction:
        return self.lattice.norm

    @cached_property
    def right_order(self) -> Order:
        return self.lattice.right_order()

    @cached_property
    def height(self) -> int:
        u = self.right_order.unit_count()
        if u % 2:
            raise ConsistencyError("odd unit count")
        return u // 2

    def conjugate_and_inverse(self) -> tuple[Lattice, Lattice]:
        return self.lattice.conj(), self.lattice.inverse()


def canonicalize(algebra: QuaternionAlgebra, generators) -> Lattice:
    """Canonical HNF lattice of the Z-span of the generators."""
    return Lattice.from_rows(algebra, generators)


def combine(a: Lattice, b: Lattice, mode: str) -> Lattice:
    if mode == "sum":
        return a + b
    if mode == "product":
        return a * b
    raise ValueError(f"unknown combine mode {mode!r}")


def lattice_norm(a: Lattice) -> Fraction:
    return a.norm


def gram_disc(a: Lattice) -> tuple[tuple[tuple[int, ...], ...], int]:
    return a.gram2, a.disc


def side_order(a: Lattice, side: str) -> Order:
    if side not in ("left", "right"):
        raise ValueError("side must be 'left' or 'right'")
    return a.left_order() if side == "left" else a.right_order()


def enumerate_by_norm(a: Lattice, bound: int, with_vectors: bool = False,
                      max_nodes: int = DEFAULT_MAX_NODES):
    """Counts r_0..r_bound of the normalized norm form on a; optionally
    also the nonzero vectors (one per +-pair)."""
    counts = a.theta_counts(bound, max_nodes)
    if not with_vectors:
        return counts
    return counts, list(a.short_elements(bound))


def equivalence_and_height(a: LeftIdeal, b: LeftIdeal) -> tuple[bool, int]:
    """Whether [a] = [b] (same left order required), and the height of [a].

    a x = b for some x iff the normalized form on inverse(a)*b represents 1.
    """
    if a.order != b.order:
        raise ValueError("ideals of different left orders")
    if a.lattice == b.lattice:
        return True, a.height
    c = a.lattice.inverse() * b.lattice
    equivalent = c.theta_counts(1)[1] > 0
    return equivalent, a.height


def maximal_order(algebra: QuaternionAlgebra, start_rows) -> Order:
    """Saturate a starting order to a maximal one (disc = p), validating
    the result; the presentation table is never trusted blindly."""
    p = algebra.p
    lat = Lattice.from_rows(algebra, start_rows)
    order = Order.from_lattice(lat)
    while order.disc != p:
        excess = order.disc // p
        if order.disc % p or excess == 0:
            raise ConstructionError("order discriminant is not a multiple of p")
        grown = _grow_at_some_prime(order, excess)
        if grown is None:
            raise ConstructionError("saturation failed to enlarge a non-maximal order")
        order = grown
    return order


def _grow_at_some_prime(order: Order, excess: int):
    from .arith import factorize

    for ell in sorted(factorize(excess)):
        b = order.basis()
        for coeffs in _projective_tuples(ell):
            num = None
            for c, x in zip(coeffs, b):
                if c:
                    num = x * c if num is None else num + x * c
            cand = num * Fraction(1, ell)
            if not cand.is_integral() or cand in order:
                continue
            bigger = Lattice.from_rows(order.algebra, list(order.coords_rows()) + [cand.coords()])
            try:
                grown = Order.from_lattice(bigger)
            except ConsistencyError:
                continue
            if grown.covolume() < order.covolume():
                return grown
    return None


def _projective_tuples(ell: int):
    """Representatives of P^3(F_ell): first nonzero coordinate equals 1."""
    for lead in range(4):
        head = [0] * lead + [1]
        tail_len = 3 - lead
        for rest in range(ell**tail_len):
            tail = []
            r = rest
            for _ in range(tail_len):
                tail.append(r % ell)
                r //= ell
            yield head + tail
