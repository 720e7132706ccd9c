"""Exact arithmetic in definite rational quaternion algebras.

An algebra H(a, b) has basis (1, i, j, k) with i^2 = a, j^2 = b,
k = ij = -ji, so k^2 = -ab.  Elements are stored as four integer
numerators over one common denominator; every operation is exact.

``algebra_for_prime`` builds the algebra ramified exactly at {p, oo}
together with a maximal-order basis, choosing the presentation by
p mod 8 and validating it with Hilbert symbols rather than trusting
the table.
"""

from __future__ import annotations

import math
from fractions import Fraction

from .arith import hilbert_symbol, is_prime, legendre, prime_iter, ramified_primes
from .errors import ConstructionError

Coords = tuple[Fraction, Fraction, Fraction, Fraction]


class QuaternionAlgebra:
    """H(a, b) over Q with a < 0, b < 0, ramified exactly at {p, oo}."""

    __slots__ = ("a", "b", "p")

    def __init__(self, a: int, b: int, p: int, _validate: bool = True):
        if a >= 0 or b >= 0:
            raise ConstructionError("definite algebra needs a < 0 and b < 0")
        self.a = a
        self.b = b
        self.p = p
        if _validate and ramified_primes(a, b) != [p]:
            raise ConstructionError(
                f"H({a},{b}) is not ramified exactly at {{{p}, oo}}"
            )

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, QuaternionAlgebra)
            and (self.a, self.b, self.p) == (other.a, other.b, other.p)
        )

    def __hash__(self) -> int:
        return hash((self.a, self.b, self.p))

    def __repr__(self) -> str:
        return f"QuaternionAlgebra({self.a}, {self.b}, p={self.p})"

    def element(self, x0, x1=0, x2=0, x3=0) -> "QuatElement":
        """Element from four rational coordinates over (1, i, j, k)."""
        fracs = [Fraction(c) for c in (x0, x1, x2, x3)]
        den = math.lcm(*(f.denominator for f in fracs))
        nums = tuple(int(f * den) for f in fracs)
        return QuatElement(self, nums, den)

    def one(self) -> "QuatElement":
        return QuatElement(self, (1, 0, 0, 0), 1)

    def basis(self) -> tuple["QuatElement", ...]:
        return tuple(
            QuatElement(self, tuple(1 if t == s else 0 for t in range(4)), 1)
            for s in range(4)
        )


class QuatElement:
    """A quaternion (n0 + n1*i + n2*j + n3*k)/den with integer numerators."""

    __slots__ = ("algebra", "nums", "den")

    def __init__(self, algebra: QuaternionAlgebra, nums: tuple[int, int, int, int], den: int):
        if den <= 0:
            nums = tuple(-n for n in nums)
            den = -den
        g = math.gcd(den, *nums)
        if g > 1:
            nums = tuple(n // g for n in nums)
            den //= g
        self.algebra = algebra
        self.nums = nums
        self.den = den

    # -- ring structure ------------------------------------------------

    def _check(self, other: "QuatElement") -> None:
        if self.algebra != other.algebra:
            raise ValueError("elements of different algebras")

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.algebra.element(other)
        self._check(other)
        d1, d2 = self.den, other.den
        return QuatElement(
            self.algebra,
            tuple(n * d2 + m * d1 for n, m in zip(self.nums, other.nums)),
            d1 * d2,
        )

    __radd__ = __add__

    def __neg__(self):
        return QuatElement(self.algebra, tuple(-n for n in self.nums), self.den)

    def __sub__(self, other):
        return self + (-other if isinstance(other, QuatElement) else self.algebra.element(-Fraction(other)))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            f = Fraction(other)
            return QuatElement(
                self.algebra,
                tuple(n * f.numerator for n in self.nums),
                self.den * f.denominator,
            )
        self._check(other)
        a, b = self.algebra.a, self.algebra.b
        x0, x1, x2, x3 = self.nums
        y0, y1, y2, y3 = other.nums
        z0 = x0 * y0 + a * x1 * y1 + b * x2 * y2 - a * b * x3 * y3
        z1 = x0 * y1 + x1 * y0 - b * x2 * y3 + b * x3 * y2
        z2 = x0 * y2 + x2 * y0 + a * x1 * y3 - a * x3 * y1
        z3 = x0 * y3 + x3 * y0 + x1 * y2 - x2 * y1
        return QuatElement(self.algebra, (z0, z1, z2, z3), self.den * other.den)

    def __rmul__(self, other):
        # scalars commute; quaternion*quaternion never reaches here
        return self.__mul__(other)

    def __pow__(self, e: int):
        if e < 0:
            raise ValueError("negative powers not supported (use conj/norm)")
        out = self.algebra.one()
        base = self
        while e:
            if e & 1:
                out = out * base
            e >>= 1
            if e:
                base = base * base
        return out

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, QuatElement)
            and self.algebra == other.algebra
            and self.nums == other.nums
            and self.den == other.den
        )

    def __hash__(self) -> int:
        return hash((self.algebra, self.nums, self.den))

    def __bool__(self) -> bool:
        return any(self.nums)

    # -- invariants ----------------------------------------------------

    def coords(self) -> Coords:
        return tuple(Fraction(n, self.den) for n in self.nums)  # type: ignore[return-value]

    def conj(self) -> "QuatElement":
        n0, n1, n2, n3 = self.nums
        return QuatElement(self.algebra, (n0, -n1, -n2, -n3), self.den)

    def trace(self) -> Fraction:
        return Fraction(2 * self.nums[0], self.den)

    def norm(self) -> Fraction:
        a, b = self.algebra.a, self.algebra.b
        n0, n1, n2, n3 = self.nums
        val = n0 * n0 - a * n1 * n1 - b * n2 * n2 + a * b * n3 * n3
        return Fraction(val, self.den * self.den)

    def delta(self) -> Fraction:
        """Discriminant of the characteristic polynomial: tr^2 - 4N."""
        return self.trace() ** 2 - 4 * self.norm()

    def is_integral(self) -> bool:
        return self.trace().denominator == 1 and self.norm().denominator == 1

    def __repr__(self) -> str:
        syms = ("", "i", "j", "k")
        terms = []
        for n, s in zip(self.nums, syms):
            if n == 0:
                continue
            mag = "" if (abs(n) == 1 and s) else str(abs(n))
            terms.append(("-" if n < 0 else ("+" if terms else "")) + mag + s)
        body = "".join(terms) or "0"
        return f"({body})/{self.den}" if self.den != 1 else body


def element_invariants(x: QuatElement) -> tuple[Fraction, Fraction, QuatElement, Fraction]:
    """(trace, norm, conjugate, delta) of an element."""
    return x.trace(), x.norm(), x.conj(), x.delta()


def multiply(x: QuatElement, y: QuatElement) -> QuatElement:
    return x * y


def _presentation_for(p: int) -> tuple[int, int]:
    """(a, b) with H(a, b) ramified exactly at {p, oo}, by p mod 8."""
    if p % 4 == 3:
        return -1, -p
    if p % 8 == 5:
        return -2, -p
    # p = 1 mod 8: least prime q = 3 mod 4 with (q|p) = -1
    for q in prime_iter():
        if q % 4 == 3 and legendre(q, p) == -1:
            return -q, -p
    raise ConstructionError("presentation search failed")  # pragma: no cover


def _maximal_order_rows(alg: QuaternionAlgebra) -> list[Coords]:
    """Coordinate rows of a maximal order of H(a, -p).

    For p = 3 mod 4 this is <1, i, (1+j)/2, (i+k)/2>, the standard
    presentation; the caller verifies disc = p, so a wrong table entry
    cannot survive.  Other residues start from <1,i,j,k> and are
    saturated by the lattice layer.
    """
    h = Fraction(1, 2)
    if alg.p % 4 == 3:
        return [
            (Fraction(1), Fraction(0), Fraction(0), Fraction(0)),
            (Fraction(0), Fraction(1), Fraction(0), Fraction(0)),
            (h, Fraction(0), h, Fraction(0)),
            (Fraction(0), h, Fraction(0), h),
        ]
    return [
        (Fraction(1), Fraction(0), Fraction(0), Fraction(0)),
        (Fraction(0), Fraction(1), Fraction(0), Fraction(0)),
        (Fraction(0), Fraction(0), Fraction(1), Fraction(0)),
        (Fraction(0), Fraction(0), Fraction(0), Fraction(1)),
    ]


def algebra_for_prime(p: int) -> tuple[QuaternionAlgebra, list[Coords]]:
    """Algebra ramified exactly at {p, oo} plus maximal-order basis rows.

    The rows are starting generators; ``quatlift.lattices.maximal_order``
    saturates and validates them (disc must come out equal to p).
    """
    if p == 2 or not is_prime(p):
        raise ConstructionError("p must be an odd prime")
    a, b = _presentation_for(p)
    alg = QuaternionAlgebra(a, b, p)
    # never trust the table: the constructor above re-checks ramification
    assert hilbert_symbol(a, b, p) == -1
    return alg, _maximal_order_rows(alg)
