"""Zero-cycles on a point model: the group ring of universe points.

A level-m cycle is a frob^m-invariant integer vector on the point table.
Level-1 cycles are identified with vectors over the frobenius orbits
(closed points); :class:`CycleSpace` fixes that orbit basis, ordered by
(degree, smallest point index), so that orbit ``k`` is lattice column ``k``.
"""

from __future__ import annotations

import itertools
import random
from math import comb

from .abgroup import FgAbGroup, Subgroup, kernel_lattice
from .lattice import Lattice
from .points import DEFAULT_SEED, PointModel

ENUMERATION_CAP = 10**5


class Cycle:
    """A frob^level-invariant formal sum of universe points."""

    __slots__ = ("model", "level", "coeffs")

    def __init__(self, model: PointModel, level: int, coeffs=None, check: bool = True):
        if model.N % level:
            raise ValueError(f"level {level} does not divide N = {model.N}")
        self.model = model
        self.level = level
        self.coeffs = {i: c for i, c in (coeffs or {}).items() if c}
        if check:
            for i, c in self.coeffs.items():
                if self.coeffs.get(model.frob_idx(i, level), 0) != c:
                    raise ValueError(f"cycle is not invariant under frob^{level}")

    @classmethod
    def point(cls, model: PointModel, i: int, level: int) -> "Cycle":
        """The class [a] of point i viewed at ``level`` (its frob^level-orbit)."""
        c = {}
        j = i
        while True:
            c[j] = 1
            j = model.frob_idx(j, level)
            if j == i:
                break
        return cls(model, level, c, check=False)

    def degree(self) -> int:
        return sum(self.coeffs.values())

    def _same(self, other: "Cycle") -> None:
        if self.model is not other.model or self.level != other.level:
            raise ValueError("cycles live at different levels")

    def __add__(self, other: "Cycle") -> "Cycle":
        self._same(other)
        c = dict(self.coeffs)
        for i, a in other.coeffs.items():
            c[i] = c.get(i, 0) + a
        return Cycle(self.model, self.level, c, check=False)

    def __neg__(self) -> "Cycle":
        return Cycle(self.model, self.level, {i: -a for i, a in self.coeffs.items()}, check=False)

    def __sub__(self, other: "Cycle") -> "Cycle":
        return self + (-other)

    def __rmul__(self, k: int) -> "Cycle":
        return Cycle(self.model, self.level, {i: k * a for i, a in self.coeffs.items()}, check=False)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Cycle):
            return NotImplemented
        return self.model is other.model and self.level == other.level and self.coeffs == other.coeffs

    __hash__ = None

    def is_zero(self) -> bool:
        return not self.coeffs

    def format(self) -> str:
        """Formal sum over orbit representatives, e.g. ``3·[P17] − 2·[P0]``."""
        seen, terms = set(), []
        for i in sorted(self.coeffs):
            if i in seen:
                continue
            j = i
            while True:
                seen.add(j)
                j = self.model.frob_idx(j, self.level)
                if j == i:
                    break
            a = self.coeffs[i]
            mag = "" if abs(a) == 1 else f"{abs(a)}·"
            sign = "−" if a < 0 else "+"
            terms.append((sign, f"{mag}[P{i}]"))
        if not terms:
            return "0"
        out = ("−" if terms[0][0] == "−" else "") + terms[0][1]
        for sign, t in terms[1:]:
            out += f" {sign} {t}"
        return out

    def __repr__(self):
        return f"Cycle(level={self.level}, {self.format()})"


def degree(c: Cycle) -> int:
    return c.degree()


def tr_push(c: Cycle, from_level: int, to_level: int) -> Cycle:
    """Σ_{i < L/E} (frob^{E i})_* c."""
    L, E = from_level, to_level
    if c.level != L or L % E:
        raise ValueError(f"cannot push a level-{c.level} cycle from {L} to {E}")
    model = c.model
    out = {}
    for i, a in c.coeffs.items():
        j = i
        for _ in range(L // E):
            out[j] = out.get(j, 0) + a
            j = model.frob_idx(j, E)
    return Cycle(model, E, out, check=False)


def res_pull(c: Cycle, from_level: int, to_level: int) -> Cycle:
    E, L = from_level, to_level
    if c.level != E or L % E or c.model.N % L:
        raise ValueError(f"cannot pull a level-{c.level} cycle from {E} to {L}")
    return Cycle(c.model, L, c.coeffs, check=False)


def pontryagin(c1: Cycle, c2: Cycle) -> Cycle:
    """Convolution: [a] ⋆ [b] = [a + b]."""
    c1._same(c2)
    model = c1.model
    out = {}
    for i, a in c1.coeffs.items():
        for j, b in c2.coeffs.items():
            k = model.add_idx(i, j)
            out[k] = out.get(k, 0) + a * b
    return Cycle(model, c1.level, out, check=False)


def _subset_sums(model: PointModel, idx) -> dict[int, int]:
    """Σ_S (−1)^{r−|S|} [Σ_{i∈S} a_i] as a sparse vector on points."""
    r = len(idx)
    out = {}
    for mask in range(1 << r):
        k = model.zero_index
        bits = 0
        for t in range(r):
            if mask >> t & 1:
                k = model.add_idx(k, idx[t])
                bits += 1
        out[k] = out.get(k, 0) + (-1) ** (r - bits)
    return {k: v for k, v in out.items() if v}


def w_generator(model: PointModel, level: int, idx) -> Cycle:
    """Tr_{level→1}(([a_1] − [0]) ⋆ ⋯ ⋆ ([a_r] − [0])) for point indices a_i in A(level)."""
    for i in idx:
        if level % model.level_of(i):
            raise ValueError(f"point {i} is not defined at level {level}")
    c = Cycle(model, level, _subset_sums(model, idx), check=False)
    return tr_push(c, level, 1)


class CycleSpace:
    """The level-1 cycle group Z^{closed points} of a model, with caches."""

    def __init__(self, model: PointModel):
        self.model = model
        seen = [False] * model.size
        orbits = []
        for i in range(model.size):
            if seen[i]:
                continue
            orb = []
            j = i
            while not seen[j]:
                seen[j] = True
                orb.append(j)
                j = model.frob_idx(j)
            orbits.append(sorted(orb))
        orbits.sort(key=lambda o: (len(o), o[0]))
        self.orbits = orbits
        self.rank = len(orbits)
        self.rep = [o[0] for o in orbits]
        self.deg = [len(o) for o in orbits]
        of = [0] * model.size
        for k, o in enumerate(orbits):
            for i in o:
                of[i] = k
        self.orbit_of = of
        self.ambient = FgAbGroup.free(self.rank)

    # -- conversions --------------------------------------------------------
    def vector(self, c: Cycle) -> dict[int, int]:
        if c.level != 1:
            raise ValueError("only level-1 cycles have orbit coordinates")
        out = {}
        for k, i in enumerate(self.rep):
            a = c.coeffs.get(i, 0)
            if a:
                out[k] = a
        return out

    def cycle(self, v: dict[int, int]) -> Cycle:
        coeffs = {}
        for k, a in v.items():
            if a:
                for i in self.orbits[k]:
                    coeffs[i] = a
        return Cycle(self.model, 1, coeffs, check=False)

    def traced_point(self, level: int, i: int) -> dict[int, int]:
        """Tr_{level→1}[a] = (level / deg a)·(orbit of a)."""
        k = self.orbit_of[i]
        return {k: level // self.deg[k]}

    def w_vector(self, level: int, idx) -> dict[int, int]:
        out = {}
        for i, a in _subset_sums(self.model, idx).items():
            k = self.orbit_of[i]
            out[k] = out.get(k, 0) + a * (level // self.deg[k])
        return {k: v for k, v in out.items() if v}

    def degree(self, v: dict[int, int]) -> int:
        return sum(a * self.deg[k] for k, a in v.items())

    def subgroup(self, lat: Lattice) -> Subgroup:
        return Subgroup._from_lattice(self.ambient, lat)

    def orbits_at(self, level: int) -> list[int]:
        return [k for k in range(self.rank) if level % self.deg[k] == 0]

    # -- the G filtration -----------------------------------------------------
    def g_lattice(self, r: int) -> Lattice:
        """G^r = Σ_E Tr_{E→1}(I_E^r), computed exactly (see :func:`traced_power`)."""
        cache = self.__dict__.setdefault("_g", {})
        if r not in cache:
            if r == 0:
                cache[r] = Lattice({k: 1} for k in range(self.rank))
            else:
                lat = Lattice()
                for E in self.model.levels:
                    lat.extend(traced_power(self, E, r))
                cache[r] = lat
        return cache[r]

    def g_lattice_enumerated(self, r: int, cap: int = ENUMERATION_CAP, samples: int = 2000, seed: int = DEFAULT_SEED) -> Lattice:
        """G^r from its defining generators, exhaustive under ``cap`` and sampled above."""
        model = self.model
        lat = Lattice()
        if r == 0:
            return Lattice({k: 1} for k in range(self.rank))
        rng = random.Random(seed)
        for E in model.levels:
            pts = model.points_at_level(E)
            if len(pts) ** r <= cap:
                tuples = itertools.combinations_with_replacement(pts, r)
            else:
                tuples = (tuple(rng.choice(pts) for _ in range(r)) for _ in range(samples))
            for t in tuples:
                lat.add(self.w_vector(E, t))
        return lat


def _monomials(k: int, below: int) -> list[tuple[int, ...]]:
    out = []
    for total in range(below):
        for c in itertools.combinations_with_replacement(range(k), total):
            a = [0] * k
            for i in c:
                a[i] += 1
            out.append(tuple(a))
    return out


def traced_power(space: CycleSpace, E: int, r: int) -> list[dict[int, int]]:
    """Generators of Tr_{E→1}(I^r) where I is the augmentation ideal of Z[A(E)].

    With A(E) = ⊕ Z/d_i and u_i = [g_i] − [0], the ring Z[A(E)]/I^r is
    Z[u]/(u^α for |α| ≥ r, (1+u_i)^{d_i} − 1), and [x] maps to
    β(x) = Π_i (1+u_i)^{c_i}.  An orbit-sum vector s is the image of I^r
    exactly when Σ_O s_O β(x_O) lies in the span W of β(x) − β(frob x);
    the trace then scales orbit O by E/deg(O).
    """
    model = space.model
    moduli, gens = model.level_basis(E)
    k = len(moduli)
    mons = _monomials(k, r)
    pos = {a: t for t, a in enumerate(mons)}
    rels = []
    for g in mons:
        for i, d in enumerate(moduli):
            rel = {}
            for j in range(1, d + 1):
                a = list(g)
                a[i] += j
                t = pos.get(tuple(a))
                if t is None:
                    break
                rel[t] = comb(d, j)
            if rel:
                rels.append(rel)
    level_pts = model.points_at_level(E)
    coords = {i: model.level_coords(E, i) for i in level_pts}

    def beta(i):
        c = coords[i]
        out = {}
        for t, a in enumerate(mons):
            v = 1
            for ci, ai in zip(c, a):
                if ai:
                    v *= comb(ci, ai)
                    if not v:
                        break
            if v:
                out[t] = v
        return out

    betas = {i: beta(i) for i in level_pts}
    for i in level_pts:
        diff = dict(betas[i])
        for t, v in betas[model.frob_idx(i)].items():
            diff[t] = diff.get(t, 0) - v
        if any(diff.values()):
            rels.append(diff)
    orbit_keys = space.orbits_at(E)
    cols = [betas[space.rep[o]] for o in orbit_keys]
    lat = kernel_lattice(space.rank, cols, target_relations=rels, keys=orbit_keys)
    out = []
    for row in lat.rows():
        out.append({o: a * (E // space.deg[o]) for o, a in row.items()})
    return out


def g_filtration(model_or_space, r: int, level: int = 1) -> Subgroup:
    """G^r as a subgroup of the level-1 cycle group Z^{closed points}."""
    if level != 1:
        raise ValueError("the filtration is computed over the base level")
    space = model_or_space if isinstance(model_or_space, CycleSpace) else CycleSpace(model_or_space)
    return space.subgroup(space.g_lattice(r).copy())


def repeated_w(space: CycleSpace, k: int, r: int) -> dict[int, int]:
    """w^{(d)}_{a,…,a} (r copies) for the representative a of orbit k, d = deg."""
    model = space.model
    a = space.rep[k]
    d = space.deg[k]
    out = {}
    mult = model.zero_index
    for j in range(r + 1):
        o = space.orbit_of[mult]
        out[o] = out.get(o, 0) + (-1) ** (r - j) * comb(r, j) * (d // space.deg[o])
        mult = model.add_idx(mult, a)
    return {o: v for o, v in out.items() if v}


__all__ = [
    "Cycle",
    "CycleSpace",
    "degree",
    "tr_push",
    "res_pull",
    "pontryagin",
    "w_generator",
    "g_filtration",
    "traced_power",
    "repeated_w",
]
