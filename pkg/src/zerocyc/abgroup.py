"""Finitely generated abelian groups and the linear algebra around them.

A group is stored as a list of cyclic moduli (``0`` for a copy of Z); the
canonical invariant factors are derived from it on demand.  Elements are
tuples of integers, reduced coordinate-wise.  Subgroups are backed by a
:class:`~zerocyc.lattice.Lattice` containing the ambient relations, so
membership and equality reduce to a Hermite normal form comparison.
"""

from __future__ import annotations

import itertools
from functools import cached_property
from math import gcd, prod

from .lattice import Lattice, matvec, smith_form, snf, xgcd

__all__ = [
    "FgAbGroup",
    "AbHom",
    "Subgroup",
    "Quotient",
    "TensorPower",
    "snf",
    "xgcd",
    "kernel",
    "image",
    "quotient",
    "tensor_power",
    "sym_invariants",
    "wedge_power",
    "coinvariants_sym",
    "coinvariants_quotient",
    "localize_compare",
]


def _red(x: int, d: int) -> int:
    return x % d if d else x


def _gcd0(values) -> int:
    g = 0
    for v in values:
        g = gcd(g, v)
    return g


class FgAbGroup:
    """The group Z/moduli[0] + Z/moduli[1] + ... (a modulus 0 means Z)."""

    def __init__(self, moduli=()):
        moduli = tuple(int(d) for d in moduli)
        if any(d < 0 for d in moduli):
            raise ValueError("moduli must be non-negative")
        self.moduli = moduli

    @classmethod
    def from_invariants(cls, factors) -> "FgAbGroup":
        factors = [int(d) for d in factors]
        torsion = [d for d in factors if d]
        if any(d < 2 for d in torsion):
            raise ValueError("torsion invariant factors must be >= 2")
        if factors != torsion + [0] * (len(factors) - len(torsion)):
            raise ValueError("free factors must come last")
        for a, b in zip(torsion, torsion[1:]):
            if b % a:
                raise ValueError(f"{a} does not divide {b}")
        return cls(factors)

    @classmethod
    def free(cls, rank: int) -> "FgAbGroup":
        return cls([0] * rank)

    @classmethod
    def from_presentation(cls, ngens: int, relations) -> tuple["FgAbGroup", "AbHom"]:
        """Z^ngens / <relations>, returned with the projection from Z^ngens."""
        free = cls.free(ngens)
        q = quotient(free, Subgroup(free, relations))
        return q.group, q.projection

    # -- basic structure ----------------------------------------------------
    @property
    def ngens(self) -> int:
        return len(self.moduli)

    @cached_property
    def invariant_factors(self) -> tuple[int, ...]:
        n = self.ngens
        diag = smith_form([[d if i == j else 0 for j in range(n)] for i, d in enumerate(self.moduli)], n).diagonal
        torsion = [d for d in diag if d > 1]
        return tuple(torsion + [0] * (n - len(diag)))

    @property
    def rank(self) -> int:
        return sum(1 for d in self.invariant_factors if d == 0)

    @property
    def is_finite(self) -> bool:
        return 0 not in self.moduli

    @property
    def order(self) -> int:
        if not self.is_finite:
            raise ValueError("infinite group")
        return prod(self.moduli)

    @property
    def exponent(self) -> int:
        if not self.is_finite:
            return 0
        e = 1
        for d in self.moduli:
            e = e * d // gcd(e, d)
        return e

    def is_trivial(self) -> bool:
        return all(d == 1 for d in self.moduli)

    def isomorphic(self, other: "FgAbGroup") -> bool:
        return self.invariant_factors == other.invariant_factors

    # -- elements -----------------------------------------------------------
    def reduce(self, x) -> tuple[int, ...]:
        if len(x) != self.ngens:
            raise ValueError(f"expected {self.ngens} coordinates, got {len(x)}")
        return tuple(_red(int(v), d) for v, d in zip(x, self.moduli))

    @property
    def zero(self) -> tuple[int, ...]:
        return (0,) * self.ngens

    def basis(self) -> list[tuple[int, ...]]:
        n = self.ngens
        return [self.reduce([int(i == j) for j in range(n)]) for i in range(n)]

    def add(self, x, y) -> tuple[int, ...]:
        return self.reduce([a + b for a, b in zip(x, y)])

    def neg(self, x) -> tuple[int, ...]:
        return self.reduce([-a for a in x])

    def scale(self, k: int, x) -> tuple[int, ...]:
        return self.reduce([k * a for a in x])

    def element_order(self, x) -> int:
        x = self.reduce(x)
        o = 1
        for v, d in zip(x, self.moduli):
            if d == 0:
                if v:
                    return 0
                continue
            k = d // gcd(v, d)
            o = o * k // gcd(o, k)
        return o

    def elements(self):
        """Iterate all elements in lexicographic coordinate order."""
        if not self.is_finite:
            raise ValueError("infinite group")
        return itertools.product(*(range(d) for d in self.moduli))

    def random_element(self, rng, bound: int = 10) -> tuple[int, ...]:
        return tuple(rng.randrange(d) if d else rng.randint(-bound, bound) for d in self.moduli)

    def relation_rows(self) -> list[dict[int, int]]:
        return [{i: d} for i, d in enumerate(self.moduli) if d]

    def direct_sum(self, other: "FgAbGroup") -> "FgAbGroup":
        return FgAbGroup(self.moduli + other.moduli)

    def __eq__(self, other):
        if not isinstance(other, FgAbGroup):
            return NotImplemented
        return self.moduli == other.moduli

    def __hash__(self):
        return hash(self.moduli)

    def __repr__(self):
        return f"FgAbGroup({list(self.invariant_factors)})"


def _to_vec(x) -> dict[int, int]:
    if isinstance(x, dict):
        return {k: v for k, v in x.items() if v}
    return {i: int(v) for i, v in enumerate(x) if v}


class AbHom:
    """A homomorphism given by the images of the source generators.

    ``columns[j]`` is the image of the j-th source generator; ``matrix`` is
    the same data laid out with rows indexed by target coordinates.
    """

    def __init__(self, source: FgAbGroup, target: FgAbGroup, columns, check: bool = True):
        self.source = source
        self.target = target
        cols = [target.reduce(c) for c in columns]
        if len(cols) != source.ngens:
            raise ValueError("one image per source generator required")
        self.columns = cols
        if check:
            for d, c in zip(source.moduli, cols):
                if d and any(target.reduce([d * v for v in c])):
                    raise ValueError("homomorphism is not well defined on torsion")

    @classmethod
    def from_matrix(cls, source, target, matrix, check=True) -> "AbHom":
        n = source.ngens
        rows = [list(r) for r in matrix]
        cols = [[r[j] for r in rows] for j in range(n)] if rows else [[]] * n
        return cls(source, target, cols, check)

    @classmethod
    def identity(cls, group: FgAbGroup) -> "AbHom":
        return cls(group, group, group.basis(), check=False)

    @classmethod
    def zero(cls, source, target) -> "AbHom":
        return cls(source, target, [target.zero] * source.ngens, check=False)

    @property
    def matrix(self) -> list[list[int]]:
        return [[c[i] for c in self.columns] for i in range(self.target.ngens)]

    def __call__(self, x) -> tuple[int, ...]:
        x = self.source.reduce(x)
        out = [0] * self.target.ngens
        for v, c in zip(x, self.columns):
            if v:
                for i, w in enumerate(c):
                    out[i] += v * w
        return self.target.reduce(out)

    def compose(self, inner: "AbHom") -> "AbHom":
        """``self ∘ inner``."""
        if inner.target != self.source:
            raise ValueError("composition of incompatible maps")
        return AbHom(inner.source, self.target, [self(c) for c in inner.columns], check=False)

    def __matmul__(self, inner):
        return self.compose(inner)

    def __add__(self, other: "AbHom") -> "AbHom":
        return AbHom(self.source, self.target, [self.target.add(a, b) for a, b in zip(self.columns, other.columns)], check=False)

    def __sub__(self, other: "AbHom") -> "AbHom":
        return AbHom(
            self.source,
            self.target,
            [self.target.add(a, self.target.neg(b)) for a, b in zip(self.columns, other.columns)],
            check=False,
        )

    def is_zero(self) -> bool:
        return not any(any(c) for c in self.columns)

    def kernel(self) -> "Subgroup":
        return kernel(self)

    def image(self) -> "Subgroup":
        return image(self)

    def __repr__(self):
        return f"AbHom({self.source!r} -> {self.target!r})"


def kernel_lattice(n: int, columns, target_moduli=(), target_relations=(), keys=None) -> Lattice:
    """Lattice of x with sum_j x_j columns[j] lying in the target relations.

    ``columns`` are sparse dicts over target coordinates; the relations are
    the diagonal ``target_moduli`` plus the sparse ``target_relations``.
    Source vector j is stored under key ``keys[j]`` (default ``j``); all keys
    must be below ``n``.  Target coordinate i lives at key ``n + i`` so it is
    eliminated before any source key.
    """
    lat = Lattice()
    for i, d in enumerate(target_moduli):
        if d:
            lat.add({n + i: d})
    for rel in target_relations:
        lat.add({n + i: a for i, a in rel.items() if a})
    for j, col in enumerate(columns):
        v = {j if keys is None else keys[j]: 1}
        for i, a in col.items():
            if a:
                v[n + i] = a
        lat.add(v)
    out = Lattice()
    out._rows = {c: r for c, r in lat._rows.items() if c < n}
    for c, r in out._rows.items():
        out._occ_add(c, r)
    return out


def kernel(h: AbHom) -> "Subgroup":
    cols = [_to_vec(c) for c in h.columns]
    lat = kernel_lattice(h.source.ngens, cols, h.target.moduli)
    return Subgroup._from_lattice(h.source, lat)


def image(h: AbHom) -> "Subgroup":
    return Subgroup(h.target, h.columns)


class Subgroup:
    """A subgroup of ``ambient`` in Hermite form (ambient relations included)."""

    def __init__(self, ambient: FgAbGroup, generators=()):
        self.ambient = ambient
        lat = Lattice(ambient.relation_rows())
        for g in generators:
            lat.add(_to_vec(g))
        self._lat = lat

    @classmethod
    def _from_lattice(cls, ambient: FgAbGroup, lat: Lattice) -> "Subgroup":
        self = cls.__new__(cls)
        self.ambient = ambient
        for r in ambient.relation_rows():
            lat.add(r)
        self._lat = lat
        return self

    @classmethod
    def whole(cls, ambient: FgAbGroup) -> "Subgroup":
        return cls(ambient, ambient.basis())

    @classmethod
    def trivial(cls, ambient: FgAbGroup) -> "Subgroup":
        return cls(ambient)

    @property
    def lattice(self) -> Lattice:
        return self._lat

    def _dense(self, v: dict) -> tuple[int, ...]:
        out = [0] * self.ambient.ngens
        for k, a in v.items():
            out[k] = a
        return self.ambient.reduce(out)

    @property
    def generators(self) -> list[tuple[int, ...]]:
        """Hermite basis rows that are nonzero in the ambient group."""
        gens = []
        mod = self.ambient.moduli
        for row in self._lat.rows():
            if len(row) == 1:
                (c, a), = row.items()
                if mod[c] and a % mod[c] == 0:
                    continue
            gens.append(self._dense(row))
        return gens

    def contains(self, x) -> bool:
        return not self._lat.reduce(_to_vec(x))

    __contains__ = contains

    def reduce(self, x) -> tuple[int, ...]:
        """Canonical representative of the coset x + S."""
        return self._dense(self._lat.reduce(_to_vec(x)))

    def add_generators(self, gens) -> "Subgroup":
        lat = self._lat.copy()
        for g in gens:
            lat.add(_to_vec(g))
        return Subgroup._from_lattice(self.ambient, lat)

    def __add__(self, other: "Subgroup") -> "Subgroup":
        self._check_same(other)
        lat = self._lat.copy()
        for r in other._lat.rows():
            lat.add(r)
        return Subgroup._from_lattice(self.ambient, lat)

    def intersection(self, other: "Subgroup") -> "Subgroup":
        self._check_same(other)
        n = self.ambient.ngens
        lat = Lattice()
        for r in self._lat.rows():
            v = {k + n: a for k, a in r.items()}
            v.update(r)
            lat.add(v)
        for r in other._lat.rows():
            lat.add({k + n: a for k, a in r.items()})
        out = Lattice()
        for c, r in lat._rows.items():
            if c < n:
                out.add(r)
        return Subgroup._from_lattice(self.ambient, out)

    def __and__(self, other):
        return self.intersection(other)

    def _check_same(self, other: "Subgroup") -> None:
        if self.ambient != other.ambient:
            raise ValueError("subgroups of different ambient groups")

    def __le__(self, other: "Subgroup") -> bool:
        self._check_same(other)
        return self._lat <= other._lat

    def __eq__(self, other) -> bool:
        if not isinstance(other, Subgroup):
            return NotImplemented
        self._check_same(other)
        return self._lat == other._lat

    __hash__ = None

    def is_trivial(self) -> bool:
        return not self.generators

    def index(self) -> int:
        """[ambient : S], or 0 when infinite."""
        q = quotient(self.ambient, self)
        return q.group.order if q.group.is_finite else 0

    def order(self) -> int:
        return self.as_group().group.order

    def as_group(self) -> "SubgroupPresentation":
        return SubgroupPresentation(self)

    def elements(self):
        h = self.as_group()
        for y in h.group.elements():
            yield h.inclusion(y)

    def __repr__(self):
        return f"Subgroup(ambient={self.ambient!r}, gens={len(self.generators)})"


class Quotient:
    """Quotient of an ambient group by a subgroup.

    ``group`` is in Smith form (modulus-1 coordinates dropped); ``project``
    works on tuples or sparse dicts and ``lift`` returns ambient tuples.
    Columns whose Hermite row is a lone ``{c: d}`` untouched by other rows
    split off as Z/d directly; only the coupled rest goes through a dense
    Smith form.
    """

    def __init__(self, ambient: FgAbGroup, sub: Subgroup):
        self.ambient = ambient
        self.sub = sub
        lat = sub.lattice
        piv = lat.pivots()
        n = ambient.ngens
        keep = [c for c in range(n) if piv.get(c) != 1]
        coupled = set()
        for c in keep:
            if c in piv and len(lat.row(c)) > 1:
                coupled.update(lat.row(c))
        simple = [c for c in keep if c not in coupled]
        dense = [c for c in keep if c in coupled]
        pos = {c: i for i, c in enumerate(dense)}
        rel = []
        for c in dense:
            if c in piv:
                row = [0] * len(dense)
                for k, a in lat.row(c).items():
                    row[pos[k]] = a
                rel.append(row)
        s = smith_form(rel, len(dense))
        diag = list(s.diagonal) + [0] * (len(dense) - len(s.diagonal))
        self._pos = pos
        self._dense = dense
        self._right = s.right
        self._right_inv = s.right_inv
        self._slots = [i for i, d in enumerate(diag) if d != 1]
        simple_mod = [piv.get(c, 0) for c in simple]
        self._simple = [c for c, d in zip(simple, simple_mod) if d != 1]
        self._simple_pos = {c: t for t, c in enumerate(self._simple)}
        self.group = FgAbGroup([piv.get(c, 0) for c in self._simple] + [diag[i] for i in self._slots])
        cols = [self.project(e) for e in ambient.basis()]
        self.projection = AbHom(ambient, self.group, cols, check=False)

    def project(self, x) -> tuple[int, ...]:
        v = self.sub.lattice.reduce(_to_vec(x))
        ns = len(self._simple)
        y = [0] * (ns + len(self._slots))
        R = self._right
        for k, a in v.items():
            t = self._simple_pos.get(k)
            if t is not None:
                y[t] += a
                continue
            row = R[self._pos[k]]
            for u, i in enumerate(self._slots):
                y[ns + u] += a * row[i]
        return self.group.reduce(y)

    def lift(self, y) -> tuple[int, ...]:
        ns = len(self._simple)
        x = [0] * self.ambient.ngens
        for t, c in enumerate(self._simple):
            x[c] = y[t]
        full = [0] * len(self._dense)
        for u, i in enumerate(self._slots):
            full[i] = y[ns + u]
        Ri = self._right_inv
        for i, a in enumerate(full):
            if a:
                for j, c in enumerate(self._dense):
                    x[c] += a * Ri[i][j]
        return self.ambient.reduce(x)


def quotient(G: FgAbGroup, S: Subgroup) -> Quotient:
    if S.ambient != G:
        raise ValueError("subgroup of a different group")
    return Quotient(G, S)


class SubgroupPresentation:
    """A subgroup as an abstract group, with inclusion and coordinate solver."""

    def __init__(self, sub: Subgroup):
        self.sub = sub
        gens = sub.generators
        self._gens = gens
        k = len(gens)
        lat = Lattice(sub.ambient.relation_rows())
        for i, g in enumerate(gens):
            v = _to_vec(g)
            v[-1 - i] = 1
            lat.add(v)
        self._track = lat
        free = FgAbGroup.free(k)
        syz = Lattice()
        for c, r in lat._rows.items():
            if c < 0:
                syz.add({-1 - kk: a for kk, a in r.items()})
        self._q = Quotient(free, Subgroup._from_lattice(free, syz))
        self.group = self._q.group
        cols = [self._combine(self._q.lift(e)) for e in self.group.basis()]
        self.inclusion = AbHom(self.group, sub.ambient, cols, check=False)

    def _combine(self, t) -> tuple[int, ...]:
        out = [0] * self.sub.ambient.ngens
        for a, g in zip(t, self._gens):
            if a:
                for i, v in enumerate(g):
                    out[i] += a * v
        return self.sub.ambient.reduce(out)

    def coords_of(self, x) -> tuple[int, ...]:
        r = self._track.reduce(_to_vec(x))
        if any(c >= 0 for c in r):
            raise ValueError("element is not in the subgroup")
        t = [0] * len(self._gens)
        for c, a in r.items():
            t[-1 - c] = -a
        return self._q.project(t)


# ---------------------------------------------------------------------------
# tensor constructions


class TensorPower:
    """M^{⊗r} over the nontrivial cyclic coordinates of M.

    The basis is indexed by multi-indices ``I`` in the nontrivial coordinates
    of ``M``; the modulus of ``e_I`` is the gcd of the slot moduli.
    """

    def __init__(self, M: FgAbGroup, r: int):
        if r < 1:
            raise ValueError("tensor power needs r >= 1")
        self.base = M
        self.r = r
        self.slots = [i for i, d in enumerate(M.moduli) if d != 1]
        self.indices = list(itertools.product(self.slots, repeat=r))
        self.position = {I: k for k, I in enumerate(self.indices)}
        self.group = FgAbGroup([_gcd0(M.moduli[i] for i in I) for I in self.indices])

    def pure(self, *xs) -> tuple[int, ...]:
        if len(xs) != self.r:
            raise ValueError(f"expected {self.r} factors")
        xs = [self.base.reduce(x) for x in xs]
        out = [prod(x[i] for x, i in zip(xs, I)) for I in self.indices]
        return self.group.reduce(out)

    def pure_sparse(self, xs) -> dict[int, int]:
        """Sparse unreduced coordinates of x_1 ⊗ ... ⊗ x_r."""
        supports = [[(i, x[i]) for i in self.slots if x[i]] for x in xs]
        out = {}
        pos = self.position
        for combo in itertools.product(*supports):
            I = tuple(i for i, _ in combo)
            out[pos[I]] = prod(a for _, a in combo)
        return out

    def permutation(self, perm) -> AbHom:
        """Slot permutation x_1⊗...⊗x_r ↦ x_{perm[0]}⊗...⊗x_{perm[r-1]}."""
        perm = tuple(perm)
        if sorted(perm) != list(range(self.r)):
            raise ValueError("not a permutation")
        inv = [0] * self.r
        for k, p in enumerate(perm):
            inv[p] = k
        cols = []
        for I in self.indices:
            J = tuple(I[perm[k]] for k in range(self.r))
            col = [0] * len(self.indices)
            col[self.position[J]] = 1
            cols.append(col)
        return AbHom(self.group, self.group, cols, check=False)

    def transposition(self, i: int) -> AbHom:
        perm = list(range(self.r))
        perm[i], perm[i + 1] = perm[i + 1], perm[i]
        return self.permutation(perm)

    def apply_diagonal(self, f: AbHom) -> AbHom:
        """f ⊗ ... ⊗ f for an endomorphism f of the base group."""
        cols = []
        for I in self.indices:
            cols.append(self.pure(*[f.columns[i] for i in I]))
        return AbHom(self.group, self.group, cols, check=False)


def tensor_power(M: FgAbGroup, r: int) -> TensorPower:
    return TensorPower(M, r)


def _transposition_differences(T: TensorPower) -> list[AbHom]:
    ident = AbHom.identity(T.group)
    return [T.transposition(i) - ident for i in range(T.r - 1)]


def sym_invariants(M: FgAbGroup, r: int) -> Subgroup:
    T = tensor_power(M, r)
    diffs = _transposition_differences(T)
    if not diffs:
        return Subgroup.whole(T.group)
    stacked = FgAbGroup(T.group.moduli * len(diffs))
    cols = [sum((list(h.columns[j]) for h in diffs), []) for j in range(T.group.ngens)]
    return kernel(AbHom(T.group, stacked, cols, check=False))


def wedge_power(M: FgAbGroup, r: int, wedge1_is_M: bool = False) -> tuple[FgAbGroup, AbHom]:
    """Cokernel of the Σ_r-invariants in M^{⊗r}, with the projection p_∧."""
    T = tensor_power(M, r)
    if r == 1 and wedge1_is_M:
        return T.group, AbHom.identity(T.group)
    q = quotient(T.group, sym_invariants(M, r))
    return q.group, q.projection


def coinvariants_quotient(M: FgAbGroup, r: int) -> Quotient:
    """M^{⊗r} modulo x − σ_*x for the adjacent transpositions σ."""
    T = tensor_power(M, r)
    gens = []
    for h in _transposition_differences(T):
        gens.extend(h.columns)
    return quotient(T.group, Subgroup(T.group, gens))


def coinvariants_sym(M: FgAbGroup, r: int) -> tuple[FgAbGroup, AbHom]:
    q = coinvariants_quotient(M, r)
    return q.group, q.projection


def localize_compare(S1: Subgroup, S2: Subgroup, m: int) -> bool:
    """Do S1 and S2 agree after tensoring with Z[1/m]?"""
    if m == 0:
        raise ValueError("m must be nonzero")
    S1._check_same(S2)
    a, b = S1.lattice, S2.lattice
    return all(b.contains_localized(r, m) for r in a.rows()) and all(
        a.contains_localized(r, m) for r in b.rows()
    )
