"""Symbols {a_1,…,a_r}_{E}, their resolution into symmetric tensors, Φ and Ψ.

The target of the resolution map is T_r, the Σ_r-coinvariants of
A(U)^{⊗r}.  A symbol over level E (relative to a base level b | E) resolves
to Σ_{k < E/b} frob^{kb} a_1 ⊗ ⋯ ⊗ frob^{kb} a_r.  Everything that is
asserted about symbol classes is asserted after resolution.

Filtration subgroups live in the level-1 cycle group with the orbit basis of
:class:`~zerocyc.cycles.CycleSpace`.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from math import factorial

from .abgroup import AbHom, FgAbGroup, Subgroup, coinvariants_quotient, kernel_lattice, localize_compare, tensor_power
from .cycles import Cycle, CycleSpace, repeated_w, w_generator
from .lattice import Lattice
from .points import PointModel
from .tower import extension_splitting

R_MAX_DEFAULT = 3


@dataclass
class SymbolExpr:
    """Σ weight·{a_1,…,a_r}_{level} over a base level (default 1)."""

    r: int
    terms: list = field(default_factory=list)  # (weight, level, point indices)
    base: int = 1

    def __post_init__(self):
        self.terms = [(int(w), int(E), tuple(idx)) for w, E, idx in self.terms]
        for w, E, idx in self.terms:
            if len(idx) != self.r:
                raise ValueError(f"term of arity {len(idx)} in an arity-{self.r} expression")
            if E % self.base:
                raise ValueError(f"level {E} is not over the base level {self.base}")

    def validate(self, model: PointModel) -> None:
        for _, E, idx in self.terms:
            if model.N % E:
                raise ValueError(f"level {E} does not divide N = {model.N}")
            for i in idx:
                if not 0 <= i < model.size:
                    raise ValueError(f"no point P{i}")
                if E % model.level_of(i):
                    raise ValueError(f"P{i} is not rational over level {E}")

    def __add__(self, other: "SymbolExpr") -> "SymbolExpr":
        if other.r != self.r or other.base != self.base:
            raise ValueError("incompatible symbol expressions")
        return SymbolExpr(self.r, self.terms + other.terms, self.base)

    def __neg__(self) -> "SymbolExpr":
        return SymbolExpr(self.r, [(-w, E, idx) for w, E, idx in self.terms], self.base)

    def __sub__(self, other):
        return self + (-other)

    def __rmul__(self, k: int) -> "SymbolExpr":
        return SymbolExpr(self.r, [(k * w, E, idx) for w, E, idx in self.terms], self.base)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for w, E, idx in self.terms:
            body = "{" + ",".join(f"P{i}" for i in idx) + "}" + f"_{E}"
            parts.append((w, body))
        out = ""
        for k, (w, body) in enumerate(parts):
            mag = "" if abs(w) == 1 else f"{abs(w)}*"
            if k == 0:
                out = ("-" if w < 0 else "") + mag + body
            else:
                out += (" - " if w < 0 else " + ") + mag + body
        return out


_TERM = re.compile(r"\s*([+-])?\s*(\d+)?\s*\*?\s*\{([^}]*)\}_(\d+)\s*")


def parse_symbol(text: str, base: int = 1) -> SymbolExpr:
    """Parse ``2*{P1,P2}_2 - {P0,P3}_1`` (weights optional)."""
    pos, terms, r = 0, [], None
    text = text.strip()
    if not text:
        raise ValueError("empty symbol expression")
    while pos < len(text):
        m = _TERM.match(text, pos)
        if not m or m.end() == pos:
            raise ValueError(f"cannot parse symbol expression at column {pos + 1}: {text[pos:]!r}")
        if terms and not m.group(1):
            raise ValueError(f"missing sign before term at column {pos + 1}")
        sign = -1 if m.group(1) == "-" else 1
        w = sign * int(m.group(2) or 1)
        body = m.group(3).strip()
        idx = []
        if body:
            for tok in body.split(","):
                tok = tok.strip()
                if not re.fullmatch(r"P\d+", tok):
                    raise ValueError(f"bad point token {tok!r}")
                idx.append(int(tok[1:]))
        if r is None:
            r = len(idx)
        elif r != len(idx):
            raise ValueError("mixed arities in one expression")
        terms.append((w, int(m.group(4)), idx))
        pos = m.end()
    return SymbolExpr(r, terms, base)


class SymbolLayer:
    """Resolution targets T_j (j ≤ r_max) and the Φ/Ψ machinery for one model."""

    def __init__(self, model: PointModel, r_max: int = R_MAX_DEFAULT):
        self.model = model
        self.r_max = r_max
        self.space = CycleSpace(model)
        self._tensor = {}
        self._target = {}
        self._phi_cols = {}
        self._f = {}

    # -- targets ----------------------------------------------------------------
    def tensor(self, r: int):
        if r not in self._tensor:
            self._tensor[r] = tensor_power(self.model.group, r)
        return self._tensor[r]

    def target(self, r: int) -> tuple[FgAbGroup, AbHom]:
        """(T_r, projection from A(U)^{⊗r}); T_0 = Z."""
        if r not in self._target:
            if r == 0:
                Z = FgAbGroup([0])
                self._target[r] = (Z, AbHom.identity(Z), None)
            else:
                q = coinvariants_quotient(self.model.group, r)
                self._target[r] = (q.group, q.projection, q)
        return self._target[r][:2]

    def target_frobenius(self, r: int) -> AbHom:
        """The diagonal frobenius on T_r, checked to descend."""
        T, proj = self.target(r)
        if r == 0:
            return AbHom.identity(T)
        q = self._target[r][2]
        diag = self.tensor(r).apply_diagonal(self.model.frob)
        h = AbHom(T, T, [proj(diag(q.lift(e))) for e in T.basis()])
        for x in self.tensor(r).group.basis():
            if h(proj(x)) != proj(diag(x)):
                raise AssertionError("frobenius does not descend to T_r")
        return h

    def project(self, r: int, vec: dict[int, int]) -> tuple[int, ...]:
        """Image in T_r of sparse tensor coordinates."""
        T, proj = self.target(r)
        out = [0] * T.ngens
        for j, a in vec.items():
            col = proj.columns[j]
            for i, v in enumerate(col):
                if v:
                    out[i] += a * v
        return T.reduce(out)

    # -- resolution ------------------------------------------------------------
    def resolve_term_vector(self, E: int, idx, base: int = 1) -> dict[int, int]:
        model = self.model
        r = len(idx)
        if r == 0:
            return {0: E // base}
        tp = self.tensor(r)
        out = {}
        cur = list(idx)
        for _ in range(E // base):
            for j, a in tp.pure_sparse([model.table[i] for i in cur]).items():
                out[j] = out.get(j, 0) + a
            cur = [model.frob_idx(i, base) for i in cur]
        return out

    def resolve(self, s: SymbolExpr) -> tuple[int, ...]:
        s.validate(self.model)
        T, _ = self.target(s.r)
        total = [0] * T.ngens
        for w, E, idx in s.terms:
            v = self.project(s.r, self.resolve_term_vector(E, idx, s.base)) if s.r else (E // s.base,)
            total = [t + w * x for t, x in zip(total, v)]
        return T.reduce(total)

    # -- Φ and Ψ ---------------------------------------------------------------
    def phi_columns(self, j: int) -> list[tuple[int, ...]]:
        """Φ_j of each closed point (orbit basis order), in T_j coordinates."""
        if j not in self._phi_cols:
            sp = self.space
            if j == 0:
                cols = [(d,) for d in sp.deg]
            else:
                cols = [self.project(j, self.resolve_term_vector(sp.deg[k], (sp.rep[k],) * j)) for k in range(sp.rank)]
            self._phi_cols[j] = cols
        return self._phi_cols[j]

    def phi_vector(self, v: dict[int, int], j: int) -> tuple[int, ...]:
        """Resolved Φ_j of a level-1 cycle given in orbit coordinates."""
        T, _ = self.target(j)
        cols = self.phi_columns(j)
        out = [0] * T.ngens
        for k, a in v.items():
            for i, x in enumerate(cols[k]):
                if x:
                    out[i] += a * x
        return T.reduce(out)

    def phi(self, c: Cycle, r: int) -> SymbolExpr:
        """Φ_r: [a] ↦ {a,…,a}_{k(a)} relative to the cycle's level."""
        base = c.level
        model = self.model
        if r == 0:
            return SymbolExpr(0, [(c.degree(), base, ())], base)
        seen, terms = set(), []
        for i in sorted(c.coeffs):
            if i in seen:
                continue
            j, size = i, 0
            while True:
                seen.add(j)
                size += 1
                j = model.frob_idx(j, base)
                if j == i:
                    break
            terms.append((c.coeffs[i], base * size, (i,) * r))
        return SymbolExpr(r, terms, base)

    def psi_vector(self, s: SymbolExpr) -> dict[int, int]:
        if s.base != 1:
            raise ValueError("Ψ is defined on symbols over the base level")
        out = {}
        for w, E, idx in s.terms:
            for k, a in self.space.w_vector(E, idx).items():
                out[k] = out.get(k, 0) + w * a
        return {k: a for k, a in out.items() if a}

    def psi(self, s: SymbolExpr) -> Cycle:
        s.validate(self.model)
        if s.base != 1:
            raise ValueError("Ψ is defined on symbols over the base level")
        total = Cycle(self.model, 1)
        for w, E, idx in s.terms:
            total = total + w * w_generator(self.model, E, idx)
        return total

    # -- filtrations -------------------------------------------------------------
    def f_lattice(self, r: int) -> Lattice:
        """F̂^r = ∩_{j<r} ker Φ_j on the level-1 cycle group."""
        if r not in self._f:
            sp = self.space
            if r == 0:
                self._f[r] = Lattice({k: 1} for k in range(sp.rank))
            else:
                moduli, blocks = [], []
                for j in range(r):
                    T, _ = self.target(j)
                    blocks.append((len(moduli), self.phi_columns(j)))
                    moduli.extend(T.moduli)
                cols = []
                for k in range(sp.rank):
                    col = {}
                    for off, pc in blocks:
                        for i, x in enumerate(pc[k]):
                            if x:
                                col[off + i] = x
                    cols.append(col)
                self._f[r] = kernel_lattice(sp.rank, cols, target_moduli=moduli)
        return self._f[r]

    def g_lattice(self, r: int) -> Lattice:
        return self.space.g_lattice(r)

    def r_lattice(self, r: int) -> Lattice:
        """R^{r+1}: G^{r+1} plus the traced-slot relations of arity r."""
        cache = self.__dict__.setdefault("_r", {})
        if r not in cache:
            lat = self.g_lattice(r + 1).copy()
            for v in self.traced_slot_relations(r):
                lat.add(v)
            cache[r] = lat
        return cache[r]

    def traced_slot_relations(self, r: int):
        """w^{(E)}_{Tr_{L/E} b, a_2..a_r} − w^{(L)}_{b, a_2..a_r} on basis tuples.

        Both sides are multilinear modulo G^{r+1}, so basis elements b of
        A(L) and multisets of basis elements of A(E) suffice.
        """
        model, sp = self.model, self.space
        for L in model.levels:
            _, bgens = model.level_basis(L)
            for E in model.levels:
                if L % E or E == L:
                    continue
                _, agens = model.level_basis(E)
                for b in bgens:
                    tb = model.trace(b, L, E)
                    for rest in itertools.combinations_with_replacement(agens, r - 1):
                        v = dict(sp.w_vector(E, (tb,) + rest))
                        for k, a in sp.w_vector(L, (b,) + rest).items():
                            v[k] = v.get(k, 0) - a
                        yield {k: a for k, a in v.items() if a}

    def b_lattice(self, r: int) -> Lattice:
        """R^r plus (r−1)!·z − Ψ_{r−1}Φ_{r−1}(z) over a basis of F̂^{r−1}."""
        if r < 2:
            raise ValueError("B^r needs r >= 2")
        cache = self.__dict__.setdefault("_b", {})
        if r not in cache:
            lat = self.r_lattice(r - 1).copy()
            f = factorial(r - 1)
            for z in self.f_lattice(r - 1).rows():
                lat.add(self._b_vector(z, r, f))
            cache[r] = lat
        return cache[r]

    def _b_vector(self, z: dict[int, int], r: int, f: int) -> dict[int, int]:
        v = {k: f * a for k, a in z.items()}
        for k, a in z.items():
            for o, x in repeated_w(self.space, k, r - 1).items():
                v[o] = v.get(o, 0) - a * x
        return {k: a for k, a in v.items() if a}

    def subgroup(self, lat: Lattice) -> Subgroup:
        return self.space.subgroup(lat.copy())

    # -- symbol images -----------------------------------------------------------
    def symbol_image(self, r: int, base: int = 1) -> Subgroup:
        """Span of ρ over all symbols of arity r (multilinear, so basis multisets suffice)."""
        T, _ = self.target(r)
        gens = []
        model = self.model
        for E in model.levels:
            if E % base:
                continue
            _, g = model.level_basis(E)
            for idx in itertools.combinations_with_replacement(g, r):
                gens.append(self.resolve(SymbolExpr(r, [(1, E, idx)], base)))
        return Subgroup(T, gens)

    def rational_image(self) -> Subgroup:
        """A(1) inside T_1."""
        T, _ = self.target(1)
        tp = self.tensor(1)
        gens = [self.project(1, tp.pure_sparse([g])) for g in self.model.level_subgroup(1).generators]
        return Subgroup(T, gens)

    def phi_image(self, r: int) -> Subgroup:
        T, _ = self.target(r)
        return Subgroup(T, [self.phi_vector(z, r) for z in self.f_lattice(r).rows()])

    def phi_kernel_on_f(self, r: int) -> list[dict[int, int]]:
        """Cycles of F̂^r killed by Φ_r, as combinations of the F̂^r basis."""
        rows = self.f_lattice(r).rows()
        T, _ = self.target(r)
        cols = [{i: x for i, x in enumerate(self.phi_vector(z, r)) if x} for z in rows]
        ker = kernel_lattice(len(rows), cols, target_moduli=T.moduli)
        out = []
        for krow in ker.rows():
            v = {}
            for t, a in krow.items():
                for k, x in rows[t].items():
                    v[k] = v.get(k, 0) + a * x
            out.append({k: a for k, a in v.items() if a})
        return out


# -- module-level API ---------------------------------------------------------


def layer_for(model: PointModel, r_max: int = R_MAX_DEFAULT) -> SymbolLayer:
    cache = model.__dict__.setdefault("_symbol_layer", None)
    if cache is None:
        cache = SymbolLayer(model, r_max)
        model.__dict__["_symbol_layer"] = cache
    return cache


def resolve(model: PointModel, s: SymbolExpr) -> tuple[int, ...]:
    return layer_for(model).resolve(s)


def phi(model: PointModel, c: Cycle, r: int) -> SymbolExpr:
    return layer_for(model).phi(c, r)


def psi(model: PointModel, s: SymbolExpr) -> Cycle:
    return layer_for(model).psi(s)


def f_filtration(model: PointModel, r_max: int) -> list[Subgroup]:
    layer = layer_for(model)
    return [layer.subgroup(layer.f_lattice(r)) for r in range(r_max + 1)]


def r_group(model: PointModel, r: int) -> Subgroup:
    layer = layer_for(model)
    return layer.subgroup(layer.r_lattice(r))


def b_group(model: PointModel, r: int) -> Subgroup:
    layer = layer_for(model)
    return layer.subgroup(layer.b_lattice(r))


def compare_b_f(model: PointModel, r: int) -> bool:
    """B^r and F̂^r agree after inverting (r−1)!."""
    layer = layer_for(model)
    return localize_compare(layer.subgroup(layer.b_lattice(r)), layer.subgroup(layer.f_lattice(r)), factorial(r - 1))


def restrict_symbols(model: PointModel, s: SymbolExpr, to_level: int) -> SymbolExpr:
    """Base change to level L: each term splits into gcd(E, L)-many conjugate terms."""
    L = to_level
    b = s.base
    if model.N % L or L % b:
        raise ValueError(f"cannot restrict from base {b} to level {L}")
    terms = []
    for w, E, idx in s.terms:
        g, f = extension_splitting(E // b, L // b)
        top = f * L
        cur = list(idx)
        for _ in range(g):
            terms.append((w, top, tuple(cur)))
            cur = [model.frob_idx(i, b) for i in cur]
    return SymbolExpr(s.r, terms, L)


def transfer_symbols(s: SymbolExpr, to_base: int) -> SymbolExpr:
    """Trace of symbols down to a smaller base level (relabelling the base)."""
    if s.base % to_base:
        raise ValueError(f"cannot transfer from base {s.base} to {to_base}")
    return SymbolExpr(s.r, s.terms, to_base)


def relation_one(model: PointModel, L: int, E: int, b: int, rest, slot: int = 0, base: int = 1):
    """{a_1,…,Tr_{L/E} b,…}_E − {a_1,…,b,…}_L for b in A(L), the rest in A(E)."""
    rest = list(rest)
    tb = model.trace(b, L, E)
    left = rest[:slot] + [tb] + rest[slot:]
    right = rest[:slot] + [b] + rest[slot:]
    r = len(left)
    return SymbolExpr(r, [(1, E, left), (-1, L, right)], base)


__all__ = [
    "SymbolExpr",
    "SymbolLayer",
    "parse_symbol",
    "layer_for",
    "resolve",
    "phi",
    "psi",
    "f_filtration",
    "r_group",
    "b_group",
    "compare_b_f",
    "restrict_symbols",
    "transfer_symbols",
    "relation_one",
]
