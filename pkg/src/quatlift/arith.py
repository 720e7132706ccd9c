"""Small exact number-theory helpers used across the package.

Everything here is plain integer / Fraction arithmetic: extended gcd,
Legendre-Kronecker symbols, Hilbert symbols, squarefree and fundamental
discriminant tests, and exact floor/sqrt utilities for rational bounds.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterator


def xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Return (g, x, y) with g = gcd(a, b) = a*x + b*y and g >= 0."""
    x, nx = 1, 0
    y, ny = 0, 1
    g, ng = a, b
    while ng:
        q = g // ng
        x, nx = nx, x - q * nx
        y, ny = ny, y - q * ny
        g, ng = ng, g - q * ng
    if g < 0:
        g, x, y = -g, -x, -y
    return g, x, y


def primes(bound: int) -> list[int]:
    """All primes <= bound, by sieve."""
    if bound < 2:
        return []
    sieve = bytearray([1]) * (bound + 1)
    sieve[0] = sieve[1] = 0
    for n in range(2, math.isqrt(bound) + 1):
        if sieve[n]:
            sieve[n * n :: n] = bytearray(len(sieve[n * n :: n]))
    return [n for n in range(2, bound + 1) if sieve[n]]


def prime_iter() -> Iterator[int]:
    """Unbounded prime generator (trial division; used for small indices)."""
    yield 2
    n = 3
    while True:
        if is_prime(n):
            yield n
        n += 2


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for q in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % q == 0:
            return n == q
    # deterministic Miller-Rabin for 64-bit-and-beyond desk inputs
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def factorize(n: int) -> dict[int, int]:
    """Prime factorization by trial division (desk-scale inputs)."""
    if n <= 0:
        raise ValueError("factorize expects a positive integer")
    out: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def is_squarefree(n: int) -> bool:
    n = abs(n)
    if n == 0:
        return False
    return all(e == 1 for e in factorize(n).values())


def is_fundamental_discriminant(d: int) -> bool:
    """True iff d is the discriminant of a quadratic field (d != 1)."""
    if d == 1 or d == 0:
        return False
    if d % 4 == 1:
        return is_squarefree(d)
    if d % 4 == 0:
        m = d // 4
        return m % 4 in (2, 3) and is_squarefree(m)
    return False


def legendre(a: int, p: int) -> int:
    """Legendre symbol (a|p) for an odd prime p."""
    a %= p
    if a == 0:
        return 0
    s = pow(a, (p - 1) // 2, p)
    return 1 if s == 1 else -1


def kronecker(a: int, n: int) -> int:
    """Kronecker symbol (a|n) for arbitrary integers."""
    if n == 0:
        return 1 if a in (1, -1) else 0
    if a % 2 == 0 and n % 2 == 0:
        return 0
    sign = 1
    if n < 0:
        n = -n
        if a < 0:
            sign = -sign
    # pull out the 2-part of n
    v = 0
    while n % 2 == 0:
        n //= 2
        v += 1
    if v % 2 == 1 and a % 8 in (3, 5):
        sign = -sign
    a %= n
    # now n is odd and positive; standard quadratic reciprocity loop
    while a != 0:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                sign = -sign
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            sign = -sign
        a %= n
    return sign if n == 1 else 0


def hilbert_symbol(a: Fraction | int, b: Fraction | int, place: int | None) -> int:
    """Hilbert symbol (a, b)_v; place=None means the real place."""
    a = Fraction(a)
    b = Fraction(b)
    if a == 0 or b == 0:
        raise ValueError("Hilbert symbol needs nonzero arguments")
    if place is None:
        return -1 if a < 0 and b < 0 else 1

    p = place

    def split(x: Fraction) -> tuple[int, int]:
        # x = p^v * u with u a p-unit, returned as (v, u mod p^3) exact integer pair
        num, den = x.numerator, x.denominator
        v = 0
        while num % p == 0:
            num //= p
            v += 1
        while den % p == 0:
            den //= p
            v -= 1
        # u as an integer representative: num * den^{-1} mod p^3 (enough for the formulas)
        u = num * pow(den, -1, p**3) % p**3
        return v, u

    va, ua = split(a)
    vb, ub = split(b)
    if p != 2:
        s = 1
        if va % 2 == 1 and vb % 2 == 1:
            s *= legendre(-1, p)
        if vb % 2 == 1:
            s *= legendre(ua, p)
        if va % 2 == 1:
            s *= legendre(ub, p)
        return s
    # p = 2: (a,b)_2 = (-1)^{eps(u)eps(v) + va*omega(ub) + vb*omega(ua)}
    eps = lambda u: (u - 1) // 2 % 2
    omega = lambda u: (u * u - 1) // 8 % 2
    e = eps(ua) * eps(ub) + va * omega(ub) + vb * omega(ua)
    return -1 if e % 2 else 1


def ramified_primes(a: int, b: int) -> list[int]:
    """Finite primes where the quaternion algebra (a, b) ramifies."""
    candidates = {2}
    candidates.update(factorize(abs(a)))
    candidates.update(factorize(abs(b)))
    return sorted(p for p in candidates if hilbert_symbol(a, b, p) == -1)


def qgcd(values) -> Fraction:
    """gcd of a collection of rationals: largest q with v/q integral for all v."""
    g = Fraction(0)
    for v in values:
        f = abs(Fraction(v))
        if f == 0:
            continue
        if g == 0:
            g = f
            continue
        lcm = g.denominator * f.denominator // math.gcd(g.denominator, f.denominator)
        g = Fraction(
            math.gcd(g.numerator * (lcm // g.denominator), f.numerator * (lcm // f.denominator)),
            lcm,
        )
    return g


def is_rational_square(x: Fraction | int) -> bool:
    x = Fraction(x)
    if x < 0:
        return False
    rn = math.isqrt(x.numerator)
    rd = math.isqrt(x.denominator)
    return rn * rn == x.numerator and rd * rd == x.denominator


def sqrt_exact(x: Fraction | int) -> Fraction:
    x = Fraction(x)
    if not is_rational_square(x):
        raise ValueError(f"{x} is not a rational square")
    return Fraction(math.isqrt(x.numerator), math.isqrt(x.denominator))


def floor_sqrt(x: Fraction | int) -> int:
    """Largest integer s >= 0 with s*s <= x (x >= 0), exact."""
    x = Fraction(x)
    if x < 0:
        raise ValueError("negative argument")
    return math.isqrt(x.numerator // x.denominator)


def floor_plus_sqrt(c: Fraction, r: Fraction) -> int:
    """floor(c + sqrt(r)) computed exactly for rationals c, r >= 0."""
    t = math.floor(c) + floor_sqrt(r)
    # t is within 1 of the answer; fix up with exact comparisons
    while _le_c_plus_sqrt(t + 1, c, r):
        t += 1
    while not _le_c_plus_sqrt(t, c, r):
        t -= 1
    return t


def _le_c_plus_sqrt(t: int, c: Fraction, r: Fraction) -> bool:
    """t <= c + sqrt(r), exact."""
    d = t - c
    if d <= 0:
        return True
    return d * d <= r


def valuation(x: Fraction | int, p: int) -> int:
    """p-adic valuation of a nonzero rational."""
    x = Fraction(x)
    if x == 0:
        raise ValueError("valuation of zero")
    v = 0
    num = x.numerator
    den = x.denominator
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v


def smallest_prime_factors(bound: int) -> list[int]:
    """spf[n] = smallest prime factor of n, for 0 <= n <= bound."""
    spf = list(range(bound + 1))
    for n in range(2, math.isqrt(bound) + 1):
        if spf[n] == n:
            for m in range(n * n, bound + 1, n):
                if spf[m] == m:
                    spf[m] = n
    return spf
