"""Cohomology of the cyclic group Gal(U/k) = Z/N through the bar resolution.

Group elements are exponents g in Z/N acting as g0^g.  The subgroup
H_m = <g0^m> (the Galois group of U over level m) is the set of multiples
of m.  Cochains of degree i on H_m are tuples of module elements indexed by
H_m^i, flattened into one :class:`~zerocyc.abgroup.FgAbGroup` element.

On top of that: cup products, restriction/corestriction, the Kummer map δ,
the Somekawa map s_n and its descent to the wedge power, and the cycle map
on F̂^r.
"""

from __future__ import annotations

import itertools

from .abgroup import AbHom, FgAbGroup, Subgroup, TensorPower, kernel, kernel_lattice, quotient, sym_invariants
from .lattice import Lattice
from .points import PointModel
from .symbols import SymbolExpr, SymbolLayer
from .tower import CapExceeded

MAX_DEGREE = 3
COCHAIN_CAP = 2 * 10**5


class ScenarioError(ValueError):
    """The model cannot supply what the computation needs (e.g. division points)."""


class GModule:
    """A finitely generated Z[Z/N]-module: a group with the action of g0."""

    def __init__(self, group: FgAbGroup, action: AbHom, N: int, check: bool = True):
        self.group = group
        self.action = action
        self.N = N
        powers = [AbHom.identity(group)]
        for _ in range(N):
            powers.append(action.compose(powers[-1]))
        if check and powers[N].columns != powers[0].columns:
            raise ValueError(f"g0^{N} does not act as the identity")
        self._powers = powers[:N]
        self.base = self
        self.power = 1
        self.tp = None

    @classmethod
    def trivial(cls, group: FgAbGroup, N: int) -> "GModule":
        return cls(group, AbHom.identity(group), N)

    def act(self, g: int, x) -> tuple[int, ...]:
        return self._powers[g % self.N](x)

    def fixed_points(self) -> Subgroup:
        return kernel(self.action - AbHom.identity(self.group))

    def tensor_power(self, r: int) -> "GModule":
        if self.base is not self:
            raise ValueError("tensor powers are taken of base modules")
        if r == 1:
            return self
        cache = self.__dict__.setdefault("_tensor", {})
        if r not in cache:
            tp = TensorPower(self.group, r)
            mod = GModule(tp.group, tp.apply_diagonal(self.action), self.N, check=False)
            mod.base, mod.power, mod.tp = self, r, tp
            cache[r] = mod
        return cache[r]

    def wedge(self, r: int) -> tuple["GModule", AbHom]:
        """∧^r of the base module (cokernel of the Σ_r-invariants), with p_∧."""
        cache = self.__dict__.setdefault("_wedge", {})
        if r not in cache:
            T = self.tensor_power(r)
            q = quotient(T.group, sym_invariants(self.group, r) if r > 1 else Subgroup.whole(T.group))
            cols = [q.projection(T.action(q.lift(e))) for e in q.group.basis()]
            W = GModule(q.group, AbHom(q.group, q.group, cols), self.N)
            for x in T.group.basis():
                if q.projection(T.action(x)) != W.action(q.projection(x)):
                    raise AssertionError("action does not descend to the wedge power")
            cache[r] = (W, q.projection)
        return cache[r]

    def __repr__(self):
        return f"GModule({self.group!r}, N={self.N})"


# ---------------------------------------------------------------------------
# bar cochains


class BarComplex:
    """Inhomogeneous cochains of H_m = <g0^m> with values in a module."""

    def __init__(self, module: GModule, m: int = 1):
        if module.N % m:
            raise ValueError(f"{m} does not divide N = {module.N}")
        self.module = module
        self.m = m
        self.elements = list(range(0, module.N, m))
        self.order = len(self.elements)
        self._pos = {h: t for t, h in enumerate(self.elements)}

    def tuples(self, i: int):
        return itertools.product(self.elements, repeat=i)

    def tuple_index(self, hs) -> int:
        k = 0
        for h in hs:
            k = k * self.order + self._pos[h % self.module.N]
        return k

    def cochain_group(self, i: int) -> FgAbGroup:
        size = self.order**i * self.module.group.ngens
        if size > COCHAIN_CAP:
            raise CapExceeded(f"cochain space of degree {i} has {size} coordinates, cap is {COCHAIN_CAP}")
        return FgAbGroup(self.module.group.moduli * self.order**i)

    def value(self, f, hs) -> tuple[int, ...]:
        k = self.module.group.ngens
        t = self.tuple_index(hs)
        return tuple(f[t * k : (t + 1) * k])

    def from_function(self, i: int, fn) -> tuple[int, ...]:
        out = []
        for hs in self.tuples(i):
            out.extend(self.module.group.reduce(fn(hs)))
        return self.cochain_group(i).reduce(out)

    def coboundary(self, f, i: int) -> tuple[int, ...]:
        M = self.module
        N = M.N

        def df(hs):
            acc = list(M.act(hs[0], self.value(f, hs[1:])))
            for j in range(i):
                merged = hs[:j] + ((hs[j] + hs[j + 1]) % N,) + hs[j + 2 :]
                sign = -1 if j % 2 == 0 else 1
                acc = [a + sign * b for a, b in zip(acc, self.value(f, merged))]
            sign = -1 if i % 2 == 0 else 1
            acc = [a + sign * b for a, b in zip(acc, self.value(f, hs[:i]))]
            return acc

        if i == 0:
            # (df)(h) = h·x − x
            return self.from_function(1, lambda hs: [a - b for a, b in zip(M.act(hs[0], f), f)])
        return self.from_function(i + 1, df)

    def coboundary_columns(self, i: int) -> list[dict[int, int]]:
        """Sparse images of the cochain basis vectors under d^i.

        Built in one pass over (i+1)-tuples: each face of a tuple contributes
        the action matrix (first face) or the identity (the others) to the
        column of the face's cochain coordinate.
        """
        M = self.module
        k = M.group.ngens
        N = M.N
        self.cochain_group(i + 1)
        basis = M.group.basis()
        acts = {h: [M.act(h, e) for e in basis] for h in self.elements}
        ident = [tuple(1 if r == c else 0 for r in range(k)) for c in range(k)]
        cols: list[dict[int, int]] = [{} for _ in range(self.order**i * k)]
        for hs in self.tuples(i + 1):
            row0 = self.tuple_index(hs) * k
            faces = [(hs[1:], 1, acts[hs[0]])]
            for j in range(i):
                merged = hs[:j] + ((hs[j] + hs[j + 1]) % N,) + hs[j + 2 :]
                faces.append((merged, -1 if j % 2 == 0 else 1, ident))
            faces.append((hs[:i], -1 if i % 2 == 0 else 1, ident))
            for face, sign, mat in faces:
                base = self.tuple_index(face) * k
                for c in range(k):
                    col = cols[base + c]
                    for r, x in enumerate(mat[c]):
                        if x:
                            col[row0 + r] = col.get(row0 + r, 0) + sign * x
        return [{t: x for t, x in col.items() if x} for col in cols]


class Cohomology:
    """H^i(H_m, M) = ker d^i / im d^{i-1}, with normal forms and lifts."""

    def __init__(self, module: GModule, i: int, m: int = 1):
        if not 0 <= i <= MAX_DEGREE:
            raise ValueError(f"degree {i} outside 0..{MAX_DEGREE}")
        self.module = module
        self.degree = i
        self.m = m
        bar = BarComplex(module, m)
        self.bar = bar
        C = bar.cochain_group(i)
        Cn = bar.cochain_group(i + 1)
        self.cochains = C
        zl = kernel_lattice(C.ngens, bar.coboundary_columns(i), target_moduli=Cn.moduli)
        self.cocycles = Subgroup._from_lattice(C, zl)
        if i == 0:
            self.coboundaries = Subgroup.trivial(C)
        else:
            prev = bar.coboundary_columns(i - 1)
            gens = []
            for col in prev:
                v = [0] * C.ngens
                for t, a in col.items():
                    v[t] = a
                gens.append(v)
            self.coboundaries = Subgroup(C, gens)
        self._q = quotient(C, self.coboundaries)
        img = Subgroup(self._q.group, [self._q.project(z) for z in self.cocycles.generators])
        self._pres = img.as_group()
        self.group = self._pres.group

    def is_cocycle(self, f) -> bool:
        return self.cocycles.contains(f)

    def class_of(self, f) -> tuple[int, ...]:
        if not self.is_cocycle(f):
            raise ValueError("cochain is not a cocycle")
        return self._pres.coords_of(self._q.project(f))

    def representative(self, coords) -> tuple[int, ...]:
        return self._q.lift(self._pres.inclusion(coords))

    @property
    def invariant_factors(self) -> tuple[int, ...]:
        return self.group.invariant_factors


def cohomology_of(module: GModule, i: int, m: int = 1) -> Cohomology:
    cache = module.__dict__.setdefault("_coh", {})
    if (i, m) not in cache:
        cache[(i, m)] = Cohomology(module, i, m)
    return cache[(i, m)]


def cohomology(module: GModule, i: int, m: int = 1) -> FgAbGroup:
    return cohomology_of(module, i, m).group


class CohClass:
    """A cocycle of H_m with values in ``module``; equality is in cohomology."""

    def __init__(self, module: GModule, degree: int, cochain, m: int = 1, check: bool = True):
        self.module = module
        self.degree = degree
        self.m = m
        self.bar = BarComplex(module, m)
        self.cochain = self.bar.cochain_group(degree).reduce(cochain)
        if check and not cohomology_of(module, degree, m).is_cocycle(self.cochain):
            raise ValueError("cochain is not a cocycle")

    @classmethod
    def from_function(cls, module, degree, fn, m: int = 1) -> "CohClass":
        return cls(module, degree, BarComplex(module, m).from_function(degree, fn), m)

    def value(self, hs) -> tuple[int, ...]:
        return self.bar.value(self.cochain, hs)

    @property
    def normal_form(self) -> tuple[int, ...]:
        return cohomology_of(self.module, self.degree, self.m).class_of(self.cochain)

    def is_zero(self) -> bool:
        return not any(self.normal_form)

    def _same(self, other: "CohClass") -> None:
        if self.module is not other.module or self.degree != other.degree or self.m != other.m:
            raise ValueError("classes live in different cohomology groups")

    def __add__(self, other: "CohClass") -> "CohClass":
        self._same(other)
        return CohClass(self.module, self.degree, [a + b for a, b in zip(self.cochain, other.cochain)], self.m, check=False)

    def __neg__(self) -> "CohClass":
        return CohClass(self.module, self.degree, [-a for a in self.cochain], self.m, check=False)

    def __sub__(self, other):
        return self + (-other)

    def __rmul__(self, k: int) -> "CohClass":
        return CohClass(self.module, self.degree, [k * a for a in self.cochain], self.m, check=False)

    def __eq__(self, other) -> bool:
        if not isinstance(other, CohClass):
            return NotImplemented
        self._same(other)
        return (self - other).is_zero()

    __hash__ = None

    def map_values(self, h: AbHom, target: GModule) -> "CohClass":
        """Push the cochain forward along a module map."""
        k = self.module.group.ngens
        vals = []
        for t in range(len(self.cochain) // k if k else self.bar.order**self.degree):
            vals.extend(h(self.cochain[t * k : (t + 1) * k]))
        return CohClass(target, self.degree, vals, self.m, check=False)

    def __repr__(self):
        try:
            nf = self.normal_form
        except ValueError:
            nf = "?"
        return f"CohClass(deg={self.degree}, m={self.m}, H={list(cohomology_of(self.module, self.degree, self.m).invariant_factors)}, nf={nf})"


def zero_class(module: GModule, degree: int, m: int = 1) -> CohClass:
    return CohClass(module, degree, BarComplex(module, m).cochain_group(degree).zero, m, check=False)


# ---------------------------------------------------------------------------
# cup products and slot permutations


def cup(x: CohClass, y: CohClass) -> CohClass:
    """(x∪y)(g_1..g_{i+j}) = x(g_1..g_i) ⊗ (g_1⋯g_i)·y(g_{i+1}..g_{i+j})."""
    if x.m != y.m:
        raise ValueError("cup product of classes on different subgroups")
    if x.module.base is not y.module.base:
        raise ValueError("cup product needs tensor powers of one base module")
    i, j = x.degree, y.degree
    if i + j > MAX_DEGREE:
        raise ValueError(f"degree {i + j} exceeds {MAX_DEGREE}")
    base = x.module.base
    a, b = x.module.power, y.module.power
    target = base.tensor_power(a + b)
    Ix, Iy = _slot_indices(x.module), _slot_indices(y.module)
    position = target.tp.position
    N = base.N

    def fn(hs):
        u = x.value(hs[:i])
        v = y.module.act(sum(hs[:i]) % N, y.value(hs[i:]))
        out = [0] * target.group.ngens
        for I, ux in zip(Ix, u):
            if ux:
                for J, vy in zip(Iy, v):
                    if vy:
                        out[position[I + J]] += ux * vy
        return out

    return CohClass(target, i + j, BarComplex(target, x.m).from_function(i + j, fn), x.m, check=False)


def _slot_indices(module: GModule) -> list[tuple[int, ...]]:
    if module.tp is not None:
        return module.tp.indices
    return [(i,) for i in range(module.group.ngens)]


def permute_slots(x: CohClass, perm) -> CohClass:
    """Apply a tensor-slot permutation to the coefficients."""
    tp = x.module.tp
    if tp is None:
        return x
    return x.map_values(tp.permutation(perm), x.module)


def block_swap(a: int, b: int) -> list[int]:
    """Slot permutation taking (y-block, x-block) to (x-block, y-block)."""
    return list(range(b, a + b)) + list(range(b))


# ---------------------------------------------------------------------------
# restriction and corestriction


def res(x: CohClass, m: int) -> CohClass:
    """Restrict a class on H_{x.m} to the subgroup H_m (x.m | m)."""
    if m % x.m or x.module.N % m:
        raise ValueError(f"H_{m} is not a subgroup of H_{x.m}")
    bar = BarComplex(x.module, m)
    return CohClass(x.module, x.degree, bar.from_function(x.degree, x.value), m, check=False)


def cor(x: CohClass, m: int) -> CohClass:
    """Corestriction from H_{x.m} to the larger group H_m (m | x.m).

    Uses homogeneous cochains with the transversal {0, m, 2m, …} below x.m:
    (Cor F)(g_0..g_i) = Σ_s (−s)·F(ρ(s+g_0), …, ρ(s+g_i)), ρ(t) = t − (t mod x.m).
    """
    big = x.m
    if big % m:
        raise ValueError(f"H_{big} is not a subgroup of H_{m}")
    M = x.module
    N = M.N
    reps = list(range(0, big, m))
    i = x.degree

    def rho(t):
        t %= N
        return t - (t % big)

    def F(gs):  # homogeneous version of x on H_big
        g0 = gs[0]
        diffs = tuple((gs[k + 1] - gs[k]) % N for k in range(i))
        return M.act(g0, x.value(diffs))

    def fn(hs):
        pts = [0]
        for h in hs:
            pts.append((pts[-1] + h) % N)
        acc = [0] * M.group.ngens
        for s in reps:
            v = M.act(-s, F(tuple(rho(s + g) for g in pts)))
            acc = [a + b for a, b in zip(acc, v)]
        return acc

    return CohClass(M, i, BarComplex(M, m).from_function(i, fn), m, check=False)


# ---------------------------------------------------------------------------
# Kummer theory on a point model


class KummerData:
    """A[n] as a Galois module, n-division points and the map δ.

    δ(a)(h) = h(b) − b where b is the smallest table index with n·b = a.
    The domain at level m is A(m) ∩ n·A(U); points outside n·A(U) have no
    division point in the model and raise :class:`ScenarioError`.
    """

    def __init__(self, model: PointModel, n: int):
        if n < 1:
            raise ValueError("n must be positive")
        if model.kind == "elliptic":
            p = model.info["p"]
            if n % p == 0:
                raise ScenarioError(f"n = {n} is divisible by the characteristic {p}")
        self.model = model
        self.n = n
        tors, _ = model.n_torsion(n, model.N)
        self.torsion = tors
        self.pres = tors.as_group()
        if model.kind == "elliptic" and self.pres.group.order != n * n:
            raise ScenarioError(f"A[{n}] is not fully rational over the universe field; enlarge N")
        G = self.pres.group
        cols = [self.pres.coords_of(model.frob(self.pres.inclusion(e))) for e in G.basis()]
        self.module = GModule(G, AbHom(G, G, cols), model.N)
        div = {}
        for b in range(model.size):
            a = model.index_of(model.group.scale(n, model.table[b]))
            div.setdefault(a, b)
        self._div = div

    def divisible(self, a: int) -> bool:
        return a in self._div

    def division_point(self, a: int) -> int:
        if a not in self._div:
            raise ScenarioError(f"P{a} has no {self.n}-division point in A(U); a larger N is needed")
        return self._div[a]

    def to_module(self, x) -> tuple[int, ...]:
        return self.pres.coords_of(x)

    def delta(self, a: int, m: int, b: int | None = None) -> CohClass:
        """δ(a) in H^1(H_m, A[n]) for a point a of level dividing m."""
        model = self.model
        if m % model.level_of(a):
            raise ValueError(f"P{a} is not rational over level {m}")
        if b is None:
            b = self.division_point(a)
        elif model.index_of(model.group.scale(self.n, model.table[b])) != a:
            raise ValueError(f"P{b} is not an {self.n}-division point of P{a}")
        tb = model.table[b]

        def fn(hs):
            hb = model.table[model.frob_idx(b, hs[0])]
            return self.to_module([u - v for u, v in zip(hb, tb)])

        return CohClass.from_function(self.module, 1, fn, m)

    def domain(self, m: int) -> Subgroup:
        """A(m) ∩ n·A(U)."""
        model = self.model
        nA = Subgroup(model.group, [model.group.scale(self.n, e) for e in model.group.basis()])
        return model.level_subgroup(m) & nA

    def delta_hom(self, m: int) -> tuple[AbHom, Subgroup]:
        """δ on the domain at level m as a homomorphism into H^1(H_m, A[n])."""
        dom = self.domain(m)
        pres = dom.as_group()
        coh = cohomology_of(self.module, 1, m)
        cols = []
        for e in pres.group.basis():
            a = self.model.index_of(pres.inclusion(e))
            cols.append(self.delta(a, m).normal_form)
        return AbHom(pres.group, coh.group, cols), dom

    def delta_kernel(self, m: int) -> Subgroup:
        h, dom = self.delta_hom(m)
        pres = dom.as_group()
        return Subgroup(self.model.group, [pres.inclusion(k) for k in kernel(h).generators])

    def n_multiples(self, m: int) -> Subgroup:
        """n·A(m) inside A(U)."""
        sub = self.model.level_subgroup(m)
        return Subgroup(self.model.group, [self.model.group.scale(self.n, g) for g in sub.generators])


def kummer_delta(model: PointModel, n: int, m: int) -> tuple[AbHom, Subgroup]:
    return kummer_data(model, n).delta_hom(m)


def kummer_data(model: PointModel, n: int) -> KummerData:
    cache = model.__dict__.setdefault("_kummer", {})
    if n not in cache:
        cache[n] = KummerData(model, n)
    return cache[n]


def somekawa_s(kd: KummerData, s: SymbolExpr) -> CohClass:
    """s_n(Σ w {a_1..a_r}_E) = Σ w·Cor_{E→1}(δ(a_1) ∪ ⋯ ∪ δ(a_r))."""
    if s.base != 1:
        raise ValueError("s_n is defined for symbols over the base level")
    if not 1 <= s.r <= MAX_DEGREE:
        raise ValueError(f"arity {s.r} outside 1..{MAX_DEGREE}")
    s.validate(kd.model)
    target = kd.module.tensor_power(s.r)
    total = zero_class(target, s.r)
    for w, E, idx in s.terms:
        c = kd.delta(idx[0], E)
        for a in idx[1:]:
            c = cup(c, kd.delta(a, E))
        total = total + w * cor(c, 1)
    return total


def wedge_descend(kd: KummerData, x: CohClass) -> CohClass:
    """Push a class with values in A[n]^{⊗r} to ∧^r A[n]."""
    r = x.module.power
    if x.module.base is not kd.module:
        raise ValueError("class does not take values in a tensor power of A[n]")
    W, p = kd.module.wedge(r)
    return x.map_values(p, W)


def orbit_class(layer: SymbolLayer, kd: KummerData, k: int, r: int) -> CohClass:
    """p_∧ s_n of the symbol Φ_r sends closed point k to, cached per (k, r)."""
    cache = kd.__dict__.setdefault("_orbit_class", {})
    key = (id(layer), k, r)
    if key not in cache:
        sp = layer.space
        rep = sp.rep[k]
        if not kd.divisible(rep):
            raise ScenarioError(f"closed point P{rep} is not {kd.n}-divisible in A(U)")
        s = SymbolExpr(r, [(1, sp.deg[k], (rep,) * r)])
        cache[key] = wedge_descend(kd, somekawa_s(kd, s))
    return cache[key]


def cycle_class(layer: SymbolLayer, kd: KummerData, z: dict[int, int], r: int) -> CohClass:
    """p_∧ s_n Φ_r(z) for z in F̂^r supported on n-divisible points."""
    if layer.f_lattice(r).reduce(z):
        raise ValueError("cycle is not in F̂^r")
    W, _ = kd.module.wedge(r)
    total = zero_class(W, r)
    for k, a in sorted(z.items()):
        if a:
            total = total + a * orbit_class(layer, kd, k, r)
    return total


def divisible_f_lattice(layer: SymbolLayer, kd: KummerData, r: int) -> Lattice:
    """F̂^r ∩ (cycles supported on n·A(U))."""
    sp = layer.space
    keys = [k for k in range(sp.rank) if kd.divisible(sp.rep[k])]
    moduli, blocks = [], []
    for j in range(r):
        T, _ = layer.target(j)
        blocks.append((len(moduli), layer.phi_columns(j)))
        moduli.extend(T.moduli)
    cols = []
    for k in keys:
        col = {}
        for off, pc in blocks:
            for i, x in enumerate(pc[k]):
                if x:
                    col[off + i] = x
        cols.append(col)
    return kernel_lattice(sp.rank, cols, target_moduli=moduli, keys=keys)


def sn_pair_data(layer: SymbolLayer, kd: KummerData) -> dict:
    """Compare ρ and p_∧ s_n on the symbols {a, b} with a, b divisible and rational.

    Reported as data only: nothing here is asserted.  A pair with ρ = 0 but
    s_n ≠ 0 means s_n does not factor through the proxy target.
    """
    model = kd.model
    pts = [a for a in model.points_at_level(1) if kd.divisible(a)]
    counts = {"pairs": 0, "resolved_zero": 0, "s_n_zero": 0, "s_n_zero_resolved_nonzero": 0, "resolved_zero_s_n_nonzero": 0}
    for a in pts:
        for b in pts:
            s = SymbolExpr(2, [(1, 1, (a, b))])
            rz = not any(layer.resolve(s))
            sz = wedge_descend(kd, somekawa_s(kd, s)).is_zero()
            counts["pairs"] += 1
            counts["resolved_zero"] += rz
            counts["s_n_zero"] += sz
            counts["s_n_zero_resolved_nonzero"] += sz and not rz
            counts["resolved_zero_s_n_nonzero"] += rz and not sz
    return counts


def trivial_module(n: int, N: int) -> GModule:
    """Z/n (n = 0 for Z) with trivial action of Z/N."""
    return GModule.trivial(FgAbGroup([n]), N)


__all__ = [
    "GModule",
    "BarComplex",
    "Cohomology",
    "CohClass",
    "ScenarioError",
    "KummerData",
    "cohomology",
    "cohomology_of",
    "sn_pair_data",
    "cup",
    "permute_slots",
    "block_swap",
    "res",
    "cor",
    "kummer_data",
    "kummer_delta",
    "somekawa_s",
    "wedge_descend",
    "cycle_class",
    "orbit_class",
    "divisible_f_lattice",
    "trivial_module",
    "zero_class",
]
