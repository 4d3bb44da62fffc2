"""Finite point-group models: elliptic curves over a tower, or mock groups.

A :class:`PointModel` fixes an element table for the universe group A(U),
a Frobenius automorphism ``frob`` with ``frob^N = 1``, and the level
subgroups ``A(m) = ker(frob^m - 1)`` for ``m | N``.  Points are referred to
by their index in the table; group coordinates are tuples in
``model.group``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from math import gcd

from .abgroup import AbHom, FgAbGroup, Subgroup, kernel
from .tower import CapExceeded, FieldTower, divisors, prime_factors

DEFAULT_SEED = 0xC0FFEE
EXHAUSTIVE_ORDER_LIMIT = 5000
POINT_CAP = 2**20


@dataclass(frozen=True)
class Point:
    """A universe point: table index plus its minimal fixing level."""

    index: int
    level: int


class PointModel:
    def __init__(self, group: FgAbGroup, frob: AbHom, N: int, table, kind: str, info=None):
        if not group.is_finite:
            raise ValueError("point groups must be finite")
        self.group = group
        self.frob = frob
        self.N = N
        self.kind = kind
        self.info = dict(info or {})
        self.table = [group.reduce(x) for x in table]
        if len(self.table) != group.order:
            raise ValueError("element table does not match the group order")
        self._radix = group.moduli
        codes = [self._code(x) for x in self.table]
        index = [0] * group.order
        for i, c in enumerate(codes):
            index[c] = i
        if len(set(codes)) != len(codes):
            raise ValueError("element table has repeated entries")
        self._index = index
        if frob.source != group or frob.target != group:
            raise ValueError("frobenius must be an endomorphism of the group")
        self._frob_idx = [self._index[self._code(frob(x))] for x in self.table]
        self._check_frobenius()
        self.levels = divisors(N)
        self._levels = self._point_levels()
        self.zero_index = self.index_of(group.zero)

    # -- table plumbing -------------------------------------------------------
    def _code(self, x) -> int:
        c = 0
        for v, d in zip(x, self._radix):
            c = c * d + v
        return c

    def index_of(self, x) -> int:
        return self._index[self._code(self.group.reduce(x))]

    def coords(self, i: int) -> tuple[int, ...]:
        return self.table[i]

    @property
    def size(self) -> int:
        return len(self.table)

    def add_idx(self, i: int, j: int) -> int:
        return self.index_of([a + b for a, b in zip(self.table[i], self.table[j])])

    def neg_idx(self, i: int) -> int:
        return self.index_of([-a for a in self.table[i]])

    def frob_idx(self, i: int, times: int = 1) -> int:
        for _ in range(times % self.N):
            i = self._frob_idx[i]
        return i

    def frob_power(self, k: int) -> AbHom:
        h = AbHom.identity(self.group)
        for _ in range(k % self.N):
            h = self.frob.compose(h)
        return h

    def _check_frobenius(self) -> None:
        seen = set()
        for i in range(len(self.table)):
            if i in seen:
                continue
            j, k = i, 0
            while True:
                seen.add(j)
                j = self._frob_idx[j]
                k += 1
                if j == i:
                    break
                if k > self.N:
                    break
            if j != i or self.N % k:
                raise ValueError("frobenius is not an automorphism of order dividing N")

    def _point_levels(self) -> list[int]:
        out = []
        for i in range(len(self.table)):
            j, k = self._frob_idx[i], 1
            while j != i:
                j = self._frob_idx[j]
                k += 1
            out.append(k)
        return out

    def level_of(self, i: int) -> int:
        """Minimal m with frob^m fixing point i (= its orbit size)."""
        return self._levels[i]

    def point(self, i: int) -> Point:
        return Point(i, self._levels[i])

    def points_at_level(self, m: int) -> list[int]:
        if self.N % m:
            raise ValueError(f"{m} does not divide N = {self.N}")
        return [i for i, d in enumerate(self._levels) if m % d == 0]

    def level_subgroup(self, m: int) -> Subgroup:
        if self.N % m:
            raise ValueError(f"{m} does not divide N = {self.N}")
        cache = self.__dict__.setdefault("_level_sub", {})
        if m not in cache:
            cache[m] = kernel(self.frob_power(m) - AbHom.identity(self.group))
        return cache[m]

    @property
    def level_subgroups(self) -> dict[int, Subgroup]:
        return {m: self.level_subgroup(m) for m in self.levels}

    def level_basis(self, m: int):
        """(moduli, generator indices) of A(m) in Smith form."""
        cache = self.__dict__.setdefault("_level_basis", {})
        if m not in cache:
            pres = self.level_subgroup(m).as_group()
            gens = [self.index_of(c) for c in pres.inclusion.columns]
            cache[m] = (pres.group.moduli, gens, pres)
        mod, gens, _ = cache[m]
        return mod, gens

    def level_coords(self, m: int, i: int) -> tuple[int, ...]:
        self.level_basis(m)
        return self.__dict__["_level_basis"][m][2].coords_of(self.table[i])

    # -- trace and restriction ----------------------------------------------
    def _unwrap(self, a):
        return (a.index, True) if isinstance(a, Point) else (a, False)

    def trace(self, a, from_level: int, to_level: int):
        """Σ_{i < L/E} frob^{E i}(a) for a fixed by frob^L."""
        i, wrapped = self._unwrap(a)
        L, E = from_level, to_level
        if self.N % L or L % E:
            raise ValueError(f"cannot trace from level {L} to level {E}")
        if L % self._levels[i]:
            raise ValueError(f"point {i} is not defined at level {L}")
        acc = [0] * self.group.ngens
        j = i
        for _ in range(L // E):
            acc = [u + v for u, v in zip(acc, self.table[j])]
            j = self.frob_idx(j, E)
        k = self.index_of(acc)
        return self.point(k) if wrapped else k

    def restrict(self, a, from_level: int, to_level: int):
        i, wrapped = self._unwrap(a)
        E, L = from_level, to_level
        if self.N % L or L % E:
            raise ValueError(f"cannot restrict from level {E} to level {L}")
        if E % self._levels[i]:
            raise ValueError(f"point {i} is not defined at level {E}")
        return self.point(i) if wrapped else i

    def n_torsion(self, n: int, m: int | None = None) -> tuple[Subgroup, AbHom]:
        """{x in A(m) : n x = 0}, with frobenius restricted to it."""
        if n < 1:
            raise ValueError("n must be positive")
        m = self.N if m is None else m
        scale = AbHom(self.group, self.group, [self.group.scale(n, e) for e in self.group.basis()], check=False)
        sub = kernel(scale) & self.level_subgroup(m)
        return sub, self.frob

    def describe(self) -> list[str]:
        lines = []
        for i, x in enumerate(self.table):
            label = self.info.get("labels", {}).get(i, str(x))
            lines.append(f"{i}\t{label}\tlevel {self._levels[i]}")
        return lines


def build_mock(moduli, frob_matrix, N: int) -> PointModel:
    """A finite group with a matrix automorphism standing in for Frobenius.

    ``frob_matrix`` has rows indexed by target coordinates.
    """
    group = FgAbGroup(moduli)
    if not group.is_finite:
        raise ValueError("mock groups must be finite")
    frob = AbHom.from_matrix(group, group, frob_matrix)
    if not kernel(frob).is_trivial():
        raise ValueError("frobenius matrix is not invertible")
    power = AbHom.identity(group)
    for _ in range(N):
        power = frob.compose(power)
    if power.columns != AbHom.identity(group).columns:
        raise ValueError(f"frobenius order does not divide N = {N}")
    table = list(group.elements())
    return PointModel(group, frob, N, table, "mock", {"moduli": list(moduli), "frob": [list(r) for r in frob_matrix]})


# ---------------------------------------------------------------------------
# elliptic curves


class EllipticCurve:
    """y^2 = x^3 + a x + b over a tower, affine points as (x, y), None = O."""

    def __init__(self, tower: FieldTower, a: int, b: int):
        if tower.p <= 3:
            raise ValueError("short Weierstrass form needs p > 3")
        self.F = F = tower
        self.a = F.from_int(a)
        self.b = F.from_int(b)
        disc = F.add(F.mul(4 % F.p, F.pow(self.a, 3)), F.mul(27 % F.p, F.mul(self.b, self.b)))
        if disc == 0:
            raise ValueError("singular curve: 4a^3 + 27b^2 = 0")

    def rhs(self, x: int) -> int:
        F = self.F
        return F.add(F.add(F.pow(x, 3), F.mul(self.a, x)), self.b)

    def on_curve(self, P) -> bool:
        if P is None:
            return True
        x, y = P
        return self.F.mul(y, y) == self.rhs(x)

    def add(self, P, Q):
        if P is None:
            return Q
        if Q is None:
            return P
        F = self.F
        x1, y1 = P
        x2, y2 = Q
        if x1 == x2:
            if F.add(y1, y2) == 0:
                return None
            num = F.add(F.mul(3 % F.p, F.mul(x1, x1)), self.a)
            lam = F.mul(num, F.inv(F.add(y1, y1)))
        else:
            lam = F.mul(F.sub(y2, y1), F.inv(F.sub(x2, x1)))
        x3 = F.sub(F.sub(F.mul(lam, lam), x1), x2)
        y3 = F.sub(F.mul(lam, F.sub(x1, x3)), y1)
        return (x3, y3)

    def neg(self, P):
        return None if P is None else (P[0], self.F.neg(P[1]))

    def mul(self, k: int, P):
        if k < 0:
            return self.mul(-k, self.neg(P))
        R = None
        while k:
            if k & 1:
                R = self.add(R, P)
            P = self.add(P, P)
            k >>= 1
        return R

    def frobenius(self, P):
        if P is None:
            return None
        return (self.F.frobenius(P[0]), self.F.frobenius(P[1]))

    def points(self) -> list:
        """All points over the universe field, infinity first, then by (x, y)."""
        F = self.F
        out = [None]
        for x in F.elements():
            y = F.sqrt(self.rhs(x))
            if y is None:
                continue
            if y == 0:
                out.append((x, 0))
            else:
                out.extend(sorted([(x, y), (x, F.neg(y))]))
        return out

    def count_over(self, m: int) -> int:
        """|E(F_{q^m})| by scanning the subfield."""
        F = self.F
        sub = set(F.fixed_field(m))
        n = 1
        for x in sub:
            r = self.rhs(x)
            if r == 0:
                n += 1
            elif F.sqrt(r) is not None and F.frobenius(F.sqrt(r), m) == F.sqrt(r):
                n += 2
        return n


def _order(E: EllipticCurve, P, n: int, primes) -> int:
    o = n
    for ell in primes:
        while o % ell == 0 and E.mul(o // ell, P) is None:
            o //= ell
    return o


def build_elliptic(tower: FieldTower, a: int, b: int, seed: int = DEFAULT_SEED, cap: int = POINT_CAP) -> PointModel:
    """Enumerate E(U) and coordinatize it as Z/d1 + Z/d2 (d1 | d2)."""
    E = EllipticCurve(tower, a, b)
    pts = E.points()
    n = len(pts)
    if n > cap:
        raise CapExceeded(f"{n} points exceed the cap {cap}")
    primes = prime_factors(n)
    if n <= EXHAUSTIVE_ORDER_LIMIT:
        sample = pts
    else:
        rng = random.Random(seed)
        sample = [pts[rng.randrange(n)] for _ in range(64)]
    orders = [(_order(E, P, n, primes), P) for P in sample]
    e = 1
    for o, _ in orders:
        e = e * o // gcd(e, o)
    # an element of order e, assembled prime by prime
    P = None
    for ell in primes:
        k = 1
        while e % (k * ell) == 0:
            k *= ell
        if k == 1:
            continue
        o, X = next((o, X) for o, X in orders if o % k == 0)
        P = E.add(P, E.mul(o // k, X))
    d1 = n // e
    if e % d1:
        raise AssertionError("sampled exponent is inconsistent with a rank-2 group")
    multiples = {}
    X = None
    for j in range(e):
        multiples[X] = j
        X = E.add(X, P)
    if len(multiples) != e:
        raise AssertionError("P does not have order e")
    Q = None
    if d1 > 1:
        for R in pts:
            if all(E.mul(d1 // ell, R) not in multiples for ell in prime_factors(d1)):
                t = multiples[E.mul(d1, R)]
                Q = E.add(R, E.mul(-(t // d1), P))
                break
        else:
            raise AssertionError("no complement generator found")
    coords = {}
    base = None
    for i in range(d1):
        X = base
        for j in range(e):
            coords[X] = (i, j)
            X = E.add(X, P)
        base = E.add(base, Q)
    if len(coords) != n:
        raise AssertionError("generators do not cover the point group")
    group = FgAbGroup([d1, e])
    frob = AbHom(group, group, [coords[E.frobenius(Q)], coords[E.frobenius(P)]])
    for X in pts:
        if coords[E.frobenius(X)] != frob(coords[X]):
            raise AssertionError("frobenius is not linear in the chosen coordinates")
    table = [coords[X] for X in pts]
    F = tower
    labels = {i: "O" if X is None else f"({F.coeffs(X[0])}, {F.coeffs(X[1])})" for i, X in enumerate(pts)}
    info = {"a": a, "b": b, "p": tower.p, "curve": E, "points": pts, "labels": labels, "generators": (Q, P)}
    return PointModel(group, frob, tower.N, table, "elliptic", info)
