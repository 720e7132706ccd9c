"""The order tower O > O~ > O' and its ideal classes.

O~ is the unique index-p suborder of a maximal order O, cut out by
p | delta(x); it is computed as the radical of the polarized
delta-form mod p, which turns the quadratic membership condition into
linear algebra.  The p+1 "level p^2" orders are the index-p sublattices
of O~ containing Z + pO (all of them are orders), each carrying a genus
sign sigma.

Subideal maps Psi are computed by exhaustive sublattice filtering with
cheap mod-p prefilters and exact verification of the survivors; the
adelic star action is kept as an independent path and cross-checked in
tests.  Class sets come from closing [O] under q-neighbors (validated
against the Eichler mass), expanding through Psi, and verifying the
pairwise-inequivalence the structure theory predicts.
"""

from __future__ import annotations

from fractions import Fraction
from functools import cached_property

from .arith import legendre, prime_iter, valuation
from .errors import ConsistencyError, ConstructionError
from .lattices import Lattice, LeftIdeal, Order, equivalence_and_height, maximal_order, transporter
from .quaternion import QuatElement, QuaternionAlgebra, algebra_for_prime


# ---------------------------------------------------------------------------
# small F_p linear algebra helpers
# ---------------------------------------------------------------------------

def _rref_mod(rows: list[list[int]], p: int) -> tuple[list[list[int]], list[int]]:
    """Row-reduce over F_p; returns (rref rows, pivot column list)."""
    m = [[v % p for v in r] for r in rows]
    pivots: list[int] = []
    r = 0
    for c in range(len(m[0]) if m else 0):
        piv = next((i for i in range(r, len(m)) if m[i][c]), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = pow(m[r][c], -1, p)
        m[r] = [v * inv % p for v in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [(v - f * w) % p for v, w in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def _kernel_mod(mat: list[list[int]], p: int) -> list[list[int]]:
    """Basis of {t : t * mat = 0 over F_p} (row vectors)."""
    n = len(mat)
    rref, pivots = _rref_mod([list(col) for col in zip(*mat)], p)  # columns as rows
    # solve t * mat = 0  <=>  mat^T t^T = 0; rref above is of mat^T
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for f in free:
        v = [0] * n
        v[f] = 1
        for row, pc in zip(rref, pivots):
            v[pc] = (-row[f]) % p
        basis.append(v)
    return basis


def _span_dim_mod(rows: list[list[int]], p: int) -> int:
    return len(_rref_mod(rows, p)[0])


# ---------------------------------------------------------------------------
# tower construction
# ---------------------------------------------------------------------------

def tilde_order(order: Order, p: int) -> Order:
    """The unique index-p suborder {x in O : p | delta(x)}."""
    b = order.basis()
    tr = [x.trace() for x in b]
    bd = [
        [int(2 * tr[r] * tr[s] - 4 * (b[r] * b[s].conj()).trace()) for s in range(4)]
        for r in range(4)
    ]
    radical = _kernel_mod(bd, p)
    if len(radical) != 3:
        raise ConsistencyError(
            f"delta-form radical has dimension {len(radical)}, expected 3"
        )
    rows = [[c * p for c in row] for row in order.coords_rows()]
    for t in radical:
        x = _combination(b, t)
        rows.append(list(x.coords()))
    tilde = Order.from_lattice(Lattice.from_rows(order.algebra, rows))
    if tilde.index_in(order) != p:
        raise ConsistencyError("tilde order does not have index p")
    for x in tilde.basis():
        if x.delta() % p:
            raise ConsistencyError("tilde order basis fails p | delta")
    return tilde


def _combination(basis, coeffs) -> QuatElement:
    x = None
    for c, b in zip(coeffs, basis):
        if c:
            x = b * c if x is None else x + b * c
    if x is None:
        raise ValueError("zero combination")
    return x


def level_p2_orders(order: Order, tilde: Order, p: int) -> list[tuple[Order, int]]:
    """All p+1 orders between Z + pO and O~ of index p, with their signs."""
    alg = order.algebra
    zpo = Lattice.from_rows(
        alg, [[1, 0, 0, 0]] + [[c * p for c in row] for row in order.coords_rows()]
    )
    h = [_int_coords(tilde, w) for w in zpo.basis()]
    _, pivots = _rref_mod(h, p)
    free = [c for c in range(4) if c not in pivots]
    if len(free) != 2:
        raise ConsistencyError("O~/(Z+pO) is not 2-dimensional")
    u1, u2 = tilde.basis()[free[0]], tilde.basis()[free[1]]
    out = []
    base_rows = zpo.coords_rows()
    for alpha, beta in [(1, t) for t in range(p)] + [(0, 1)]:
        x = _combination((u1, u2), (alpha, beta))
        lat = Lattice.from_rows(alg, base_rows + [list(x.coords())])
        try:
            cand = Order.from_lattice(lat)
        except ConsistencyError as exc:
            raise ConsistencyError(f"index-p sublattice is not an order: {exc}") from exc
        if cand.index_in(tilde) != p:
            raise ConsistencyError("level-p^2 candidate has wrong index")
        out.append((cand, sigma(cand, order, p)))
    out.sort(key=lambda t: t[0].key())
    if {s for _, s in out} != {1, -1}:
        raise ConsistencyError("expected both genus signs among level-p^2 orders")
    return out


def _int_coords(lattice: Lattice, x: QuatElement) -> list[int]:
    c = lattice.coords_of(x)
    if any(v.denominator != 1 for v in c):
        raise ConsistencyError("element not in lattice")
    return [int(v) for v in c]


def sigma(op: Order, maximal: Order, p: int) -> int:
    """Genus sign of a level-p^2 order.

    For a witness x in O' outside Z + pO, delta(x) is exactly divisible
    by p and the ternary form value -delta(x)/p is a p-unit whose square
    class does not depend on x; sigma is its Legendre symbol.  (With this
    orientation the admissible twist discriminants -pd of the lift are
    the ones the genus actually represents.)
    """
    zpo = Lattice.from_rows(
        maximal.algebra,
        [[1, 0, 0, 0]] + [[c * p for c in row] for row in maximal.coords_rows()],
    )
    b = op.basis()
    witnesses = list(b) + [b[i] + b[j] for i in range(4) for j in range(i + 1, 4)]
    for x in witnesses:
        if x in zpo:
            continue
        d = x.delta()
        if d % p:
            raise ConsistencyError("witness outside Z+pO has p-unit delta")
        q = d / p
        if q % p == 0:
            continue  # p^2 | delta: pick another witness
        return legendre(int(-q) % p, p)
    raise ConsistencyError("no sigma witness found")


class OrderTower:
    """p, the maximal order, O~, and the p+1 level-p^2 orders with signs."""

    def __init__(self, p: int):
        alg, rows = algebra_for_prime(p)
        self.p = p
        self.algebra: QuaternionAlgebra = alg
        self.maximal: Order = maximal_order(alg, rows)
        self.tilde: Order = tilde_order(self.maximal, p)
        self.level_p2: list[tuple[Order, int]] = level_p2_orders(self.maximal, self.tilde, p)

    def order_p2(self, sign: int) -> Order:
        """Canonical level-p^2 order of the given sign (least basis)."""
        for op, s in self.level_p2:
            if s == sign:
                return op
        raise ValueError("sign must be +1 or -1")  # pragma: no cover

    def zpo(self) -> Lattice:
        return Lattice.from_rows(
            self.algebra,
            [[1, 0, 0, 0]]
            + [[c * self.p for c in row] for row in self.maximal.coords_rows()],
        )

    def m_ideal(self, op: Order) -> Lattice:
        """The bilateral O~-ideal {x : x O~ <= O'} of index p^2 in O~."""
        mults = [("right", b) for b in self.tilde.basis()]
        m = transporter(mults, op, op)
        if m.index_in(self.tilde) != self.p**2:
            raise ConsistencyError("m-ideal does not have index p^2")
        tl = Lattice(self.algebra, self.tilde.den, self.tilde.mat)
        if tl * m != m or m * tl != m:
            raise ConsistencyError("m-ideal is not bilateral")
        po = self.maximal.scale(self.p)
        opl = Lattice(self.algebra, op.den, op.mat)
        if not (opl.contains_lattice(m) and m.contains_lattice(po)):
            raise ConsistencyError("m-ideal chain containment fails")
        if opl == m or m == po:
            raise ConsistencyError("m-ideal chain containment is not strict")
        return m


# ---------------------------------------------------------------------------
# subideal maps
# ---------------------------------------------------------------------------

def psi_down(tower: OrderTower, a: LeftIdeal, small: Order) -> list[LeftIdeal]:
    """Norm-preserving subideals of a over the next order down the tower.

    (O, O~): index-p sublattices b with pa <= b <= a, filtered by
    O~ b = b and N(b) = N(a); exactly p+1 survive.
    (O~, O'): the p+1 lattices strictly between m a and a, of which the
    p norm-preserving ones survive.
    """
    p = tower.p
    if a.order == tower.maximal and small == tower.tilde:
        ideals = _psi_hyperplanes(tower, a, small)
        expected = p + 1
    elif a.order == tower.tilde and any(small == op for op, _ in tower.level_p2):
        ideals = _psi_lines(tower, a, small)
        expected = p
    else:
        raise ValueError("psi_down expects (maximal, tilde) or (tilde, level-p^2)")
    if len(ideals) != expected:
        raise ConsistencyError(
            f"psi survivor count {len(ideals)} != expected {expected}"
        )
    ideals.sort(key=lambda ideal: ideal.key())
    return ideals


def _psi_hyperplanes(tower: OrderTower, a: LeftIdeal, small: Order) -> list[LeftIdeal]:
    p = tower.p
    lat = a.lattice
    basis = lat.basis()
    mults = []
    for u in small.basis():
        mults.append([_int_coords(lat, u * bs) for bs in basis])
    out = []
    for phi in _projective_columns(p):
        if all(_maps_line_to_line(m, phi, p) for m in mults):
            b = _hyperplane_sublattice(lat, phi, p)
            if b.norm == lat.norm:
                out.append(LeftIdeal(b, small, provenance="psi"))
    return out


def _maps_line_to_line(m, phi, p) -> bool:
    img = [sum(m[r][c] * phi[c] for c in range(4)) % p for r in range(4)]
    # img must be proportional to phi mod p
    for r in range(4):
        for s in range(r + 1, 4):
            if (img[r] * phi[s] - img[s] * phi[r]) % p:
                return False
    return True


def _projective_columns(p: int):
    for lead in range(4):
        for rest in range(p ** (3 - lead)):
            v = [0] * lead + [1]
            r = rest
            for _ in range(3 - lead):
                v.append(r % p)
                r //= p
            yield v


def _hyperplane_sublattice(lat: Lattice, phi, p: int) -> Lattice:
    i0 = next(i for i in range(4) if phi[i] % p)
    inv = pow(phi[i0], -1, p)
    combos = []
    for j in range(4):
        if j == i0:
            combos.append([p if c == i0 else 0 for c in range(4)])
        else:
            cj = (-phi[j] * inv) % p  # e_j + cj * e_{i0} kills phi
            row = [0] * 4
            row[j] = 1
            row[i0] = cj
            combos.append(row)
    w = lat.coords_rows()
    rows = [
        [sum(Fraction(t[i]) * w[i][c] for i in range(4)) for c in range(4)]
        for t in combos
    ]
    return Lattice.from_rows(lat.algebra, rows)


def _psi_lines(tower: OrderTower, a: LeftIdeal, small: Order) -> list[LeftIdeal]:
    p = tower.p
    m = tower.m_ideal(small)
    lat = a.lattice
    ma = m * lat
    h = [_int_coords(lat, w) for w in ma.basis()]
    _, pivots = _rref_mod(h, p)
    free = [c for c in range(4) if c not in pivots]
    if len(free) != 2:
        raise ConsistencyError("b/mb is not 2-dimensional")
    base_rows = ma.coords_rows()
    wrows = lat.coords_rows()
    out = []
    for alpha, beta in [(1, t) for t in range(p)] + [(0, 1)]:
        combo = [0] * 4
        combo[free[0]] = alpha
        combo[free[1]] = beta
        row = [sum(Fraction(combo[i]) * wrows[i][c] for i in range(4)) for c in range(4)]
        cand = Lattice.from_rows(lat.algebra, base_rows + [row])
        if cand.norm == lat.norm:
            out.append(LeftIdeal(cand, small, provenance="psi"))
    return out


# ---------------------------------------------------------------------------
# star action and the G\H generator
# ---------------------------------------------------------------------------

def star_action(b: LeftIdeal | Lattice, y: QuatElement, p: int,
                right_order: Order | None = None):
    """Right action of the adele that is y at p and 1 elsewhere.

    k is minimal-by-recipe: v_p(N(y)) plus however many powers of p it
    takes to make y integral over the right order; y is then reduced
    mod p^k in that basis and the result is p^k b + b y'.
    """
    lat = b.lattice if isinstance(b, LeftIdeal) else b
    if not y:
        raise ValueError("y must be invertible at p")
    order = right_order
    if order is None:
        order = b.right_order if isinstance(b, LeftIdeal) else lat.right_order()
    coords = order.coords_of(y)
    s = max([0] + [-valuation(c, p) for c in coords if c])
    k = valuation(y.norm(), p) + s
    mod = p ** (k + s)
    reduced = []
    for c in coords:
        num = c.numerator * p**s
        den = c.denominator
        if den % p == 0:
            raise ConsistencyError("reduction denominator not prime to p")
        h = num * pow(den, -1, mod) % mod if mod > 1 else 0
        reduced.append(Fraction(h, p**s))
    yr = None
    for c, bs in zip(reduced, order.basis()):
        if c:
            yr = bs * c if yr is None else yr + bs * c
    pkb = lat.scale(p**k)
    result = pkb if yr is None else pkb + lat.multiply_element(yr, side="right")
    if isinstance(b, LeftIdeal):
        return LeftIdeal(result, b.order, provenance="star")
    return result


def gh_generator(order: Order, p: int, max_height: int = 4) -> QuatElement:
    """An element of O, prime to p, whose p+1 powers land in distinct
    classes of the cyclic quotient (u ~ v iff p | delta(u conj(v)))."""
    basis = order.basis()
    for height in range(1, max_height + 1):
        for coeffs in _coeff_box(height):
            u = _combination(basis, coeffs)
            if u.norm() % p == 0:
                continue
            if _distinct_power_classes(u, p):
                return u
    raise ConstructionError("generator search bound exhausted")


def _coeff_box(height: int):
    rng = list(range(-height, height + 1))
    for c0 in rng:
        for c1 in rng:
            for c2 in rng:
                for c3 in rng:
                    c = (c0, c1, c2, c3)
                    if max(abs(v) for v in c) == height:
                        yield c


def _distinct_power_classes(u: QuatElement, p: int) -> bool:
    powers = [u.algebra.one()]
    for _ in range(p):
        powers.append(powers[-1] * u)
    for i in range(p + 1):
        for j in range(i + 1, p + 1):
            if (powers[i] * powers[j].conj()).delta() % p == 0:
                return False
    return True


def norm_character(ideal: LeftIdeal, p: int, search_bound: int = 64) -> int:
    """Genus sign of the quaternary norm form on the ideal: the Legendre
    symbol of any normalized value prime to p."""
    counts = ideal.lattice.theta_counts(search_bound)
    for m in range(1, search_bound + 1):
        if counts[m] and m % p:
            return legendre(m, p)
    raise ConsistencyError("no value prime to p found")  # pragma: no cover


# ---------------------------------------------------------------------------
# class sets
# ---------------------------------------------------------------------------

class ClassSet:
    """Representatives (canonical, lex-least per class) plus heights and,
    below the maximal order, the parent partition."""

    def __init__(self, tower: OrderTower, tag: str, order: Order,
                 reps: list[LeftIdeal], parents: list[int] | None,
                 sign: int | None = None):
        self.tower = tower
        self.tag = tag
        self.order = order
        self.reps = tuple(reps)
        self.parents = tuple(parents) if parents is not None else None
        self.sign = sign

    def __len__(self) -> int:
        return len(self.reps)

    @cached_property
    def heights(self) -> tuple[int, ...]:
        return tuple(r.height for r in self.reps)

    @cached_property
    def chi(self) -> tuple[int, ...]:
        return tuple(norm_character(r, self.tower.p) for r in self.reps)

    def index_of(self, ideal: LeftIdeal) -> int:
        """Class index of an ideal with the same left order (by equivalence)."""
        for i, r in enumerate(self.reps):
            if equivalence_and_height(ideal, r)[0]:
                return i
        raise ConsistencyError("ideal matches no class representative")


def class_set(tower: OrderTower, tag: str, sign: int | None = None,
              verify_inequivalence: bool = True) -> ClassSet:
    if tag == "maximal":
        return _class_set_maximal(tower)
    if tag == "tilde":
        return _class_set_tilde(tower)
    if tag == "p2":
        if sign not in (1, -1):
            raise ValueError("p2 class set needs sign +1 or -1")
        return _class_set_p2(tower, sign, verify_inequivalence)
    raise ValueError(f"unknown class set tag {tag!r}")


def _class_set_maximal(tower: OrderTower) -> ClassSet:
    p = tower.p
    target_mass = Fraction(p - 1, 24)
    q = next(qq for qq in prime_iter() if qq != p)
    unit = LeftIdeal(Lattice(tower.algebra, tower.maximal.den, tower.maximal.mat),
                     tower.maximal, provenance="unit")
    reps = [unit]
    mass = Fraction(1, 2 * unit.height)
    frontier = [unit]
    while frontier and mass < target_mass:
        current = frontier.pop(0)
        for nb in _q_neighbors(tower, current, q):
            if any(equivalence_and_height(nb, r)[0] for r in reps):
                continue
            reps.append(nb)
            frontier.append(nb)
            mass += Fraction(1, 2 * nb.height)
            if mass > target_mass:
                raise ConsistencyError("mass oracle exceeded during closure")
    if mass != target_mass:
        raise ConsistencyError(
            f"class set incomplete: mass {mass} != {target_mass}"
        )
    reps.sort(key=lambda ideal: ideal.key())
    return ClassSet(tower, "maximal", tower.maximal, reps, None)


def _q_neighbors(tower: OrderTower, a: LeftIdeal, q: int) -> list[LeftIdeal]:
    """T_q(a): the q+1 subideals of index q^2 and norm q N(a)."""
    lat = a.lattice
    basis = lat.basis()
    mults = [
        [_int_coords(lat, u * bs) for bs in basis] for u in tower.maximal.basis()
    ]
    out = []
    for srows in _dim2_subspaces(q):
        if not all(_stable_subspace(srows, m, q) for m in mults):
            continue
        b = _subspace_sublattice(lat, srows, q)
        if b.norm == q * lat.norm:
            out.append(LeftIdeal(b, tower.maximal, provenance="neighbor"))
    if len(out) != q + 1:
        raise ConsistencyError(f"expected {q + 1} neighbors, found {len(out)}")
    out.sort(key=lambda ideal: ideal.key())
    return out


def _dim2_subspaces(q: int):
    """RREF bases of the 2-dimensional subspaces of F_q^4."""
    for p1 in range(4):
        for p2 in range(p1 + 1, 4):
            free1 = [c for c in range(p1 + 1, 4) if c != p2]
            free2 = [c for c in range(p2 + 1, 4)]
            nfree = len(free1) + len(free2)
            for assignment in range(q**nfree):
                vals = []
                r = assignment
                for _ in range(nfree):
                    vals.append(r % q)
                    r //= q
                row1 = [0] * 4
                row2 = [0] * 4
                row1[p1] = 1
                row2[p2] = 1
                for c, v in zip(free1, vals[: len(free1)]):
                    row1[c] = v
                for c, v in zip(free2, vals[len(free1):]):
                    row2[c] = v
                yield [row1, row2]


def _stable_subspace(srows, m, q) -> bool:
    images = [
        [sum(row[r] * m[r][c] for r in range(4)) % q for c in range(4)]
        for row in srows
    ]
    return _span_dim_mod(srows + images, q) == 2


def _subspace_sublattice(lat: Lattice, srows, q: int) -> Lattice:
    w = lat.coords_rows()
    rows = [[v * q for v in row] for row in w]
    for t in srows:
        rows.append([sum(Fraction(t[i]) * w[i][c] for i in range(4)) for c in range(4)])
    return Lattice.from_rows(lat.algebra, rows)


def _class_set_tilde(tower: OrderTower) -> ClassSet:
    maximal = _class_set_maximal(tower)
    reps: list[LeftIdeal] = []
    parents: list[int] = []
    for parent_idx, a in enumerate(maximal.reps):
        pool = psi_down(tower, a, tower.tilde)
        kept: list[LeftIdeal] = []
        for cand in pool:  # already in canonical order: first seen is lex-least
            if any(equivalence_and_height(cand, r)[0] for r in kept):
                continue
            kept.append(cand)
        reps.extend(kept)
        parents.extend([parent_idx] * len(kept))
    cs = ClassSet(tower, "tilde", tower.tilde, reps, parents)
    cs._maximal = maximal  # type: ignore[attr-defined]
    return cs


def _class_set_p2(tower: OrderTower, sign: int, verify: bool) -> ClassSet:
    tilde_cs = class_set(tower, "tilde")
    op = tower.order_p2(sign)
    reps: list[LeftIdeal] = []
    parents: list[int] = []
    for parent_idx, b in enumerate(tilde_cs.reps):
        for cand in psi_down(tower, b, op):
            reps.append(cand)
            parents.append(parent_idx)
    if len(reps) != tower.p * len(tilde_cs.reps):
        raise ConsistencyError("level-p^2 class count != p * #I(O~)")
    if verify:
        for i in range(len(reps)):
            for j in range(i + 1, len(reps)):
                if equivalence_and_height(reps[i], reps[j])[0]:
                    raise ConsistencyError(
                        f"unexpected equivalence between level-p^2 classes {i}, {j}"
                    )
    cs = ClassSet(tower, "p2", op, reps, parents, sign=sign)
    cs._tilde = tilde_cs  # type: ignore[attr-defined]
    return cs
