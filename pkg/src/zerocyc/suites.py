"""Verification suites run by the CLI.

Every suite yields check records ``{"id", "claim", "status", "data"}``.
``status`` is ``pass``, ``fail`` or ``skip``; ``data`` holds the computed
invariant factors or membership witnesses.  Randomness comes from a
``random.Random`` seeded by (scenario seed, check id), so reports are
reproducible.
"""

from __future__ import annotations

import random
import zlib
from dataclasses import dataclass
from math import factorial, gcd
from typing import Callable, Iterator

from .abgroup import FgAbGroup, image, localize_compare
from .cycles import Cycle, res_pull, tr_push
from .gcoh import (
    BarComplex,
    CohClass,
    ScenarioError,
    cohomology,
    cohomology_of,
    cycle_class,
    divisible_f_lattice,
    kummer_data,
    permute_slots,
    somekawa_s,
    trivial_module,
    wedge_descend,
)
from .points import PointModel
from .symbols import SymbolExpr, SymbolLayer, layer_for, relation_one, restrict_symbols, transfer_symbols

EXHAUSTIVE_POINTS = 2000
ROUNDTRIP_SAMPLES = 200
RELATION_SAMPLES = 100
KILL_SAMPLES = 48
FINITE_QUOTIENT_TAG = "finite-quotient model"


@dataclass
class Context:
    model: PointModel
    r_max: int
    n: int
    seed: int

    @property
    def layer(self) -> SymbolLayer:
        return layer_for(self.model, max(self.r_max, 3))

    def rng(self, check_id: str) -> random.Random:
        return random.Random(self.seed * 1_000_003 + zlib.crc32(check_id.encode()))


def record(check_id: str, claim: str, ok: bool | None, **data) -> dict:
    status = "skip" if ok is None else ("pass" if ok else "fail")
    return {"id": check_id, "claim": claim, "status": status, "data": data}


def _factors(G: FgAbGroup) -> list[int]:
    return list(G.invariant_factors)


def _random_points(model: PointModel, level: int, rng: random.Random, k: int) -> list[int]:
    pts = model.points_at_level(level)
    return [rng.choice(pts) for _ in range(k)]


def _random_symbol(model: PointModel, r: int, rng: random.Random, base: int = 1, terms: int = 2) -> SymbolExpr:
    levels = [E for E in model.levels if E % base == 0]
    out = []
    for _ in range(rng.randint(1, terms)):
        E = rng.choice(levels)
        out.append((rng.choice([-2, -1, 1, 1, 2, 3]), E, _random_points(model, E, rng, r)))
    return SymbolExpr(r, out, base)


def _level_pairs(model: PointModel):
    for E in model.levels:
        for L in model.levels:
            if L % E == 0:
                yield E, L


# -- suites ------------------------------------------------------------------------


def suite_roundtrip(ctx: Context) -> Iterator[dict]:
    claim = "Phi_r(Psi_r(s)) = r! s after resolution"
    layer, model = ctx.layer, ctx.model
    for r in range(1, ctx.r_max + 1):
        cid = f"roundtrip.r{r}"
        rng = ctx.rng(cid)
        T, _ = layer.target(r)
        bad = []
        for _ in range(ROUNDTRIP_SAMPLES):
            s = _random_symbol(model, r, rng)
            lhs = layer.phi_vector(layer.psi_vector(s), r)
            rhs = T.scale(factorial(r), layer.resolve(s))
            if lhs != rhs:
                bad.append(str(s))
        yield record(cid, claim, not bad, samples=ROUNDTRIP_SAMPLES, target=_factors(T), counterexamples=bad[:3])


def suite_filtration(ctx: Context) -> Iterator[dict]:
    claim = "G^{r+1} <= R^{r+1} <= F^{r+1} <= F^r"
    layer = ctx.layer
    for r in range(1, ctx.r_max + 1):
        G, R, F1, F0 = layer.g_lattice(r + 1), layer.r_lattice(r), layer.f_lattice(r + 1), layer.f_lattice(r)
        steps = {"G<=R": G <= R, "R<=F": R <= F1, "F<=F": F1 <= F0}
        yield record(f"filtration.r{r}", claim, all(steps.values()), **steps, rank=F0.rank, orbits=layer.space.rank)


def suite_f2r2(ctx: Context) -> Iterator[dict]:
    layer = ctx.layer
    R2, F2 = layer.r_lattice(1), layer.f_lattice(2)
    yield record("f2r2.equal", "F^2 = R^2 integrally", R2 == F2)
    if ctx.r_max >= 3:
        B, F3 = layer.subgroup(layer.b_lattice(3)), layer.subgroup(layer.f_lattice(3))
        yield record("f2r2.b3", "B^3 = F^3 after inverting 2", localize_compare(B, F3, 2), exact=B == F3, contained=B <= F3)


def suite_projection(ctx: Context) -> Iterator[dict]:
    claim = "trace o restrict = [L:E] on points, cycles and resolved symbols"
    model, layer = ctx.model, ctx.layer
    exhaustive = model.size <= EXHAUSTIVE_POINTS
    rng = ctx.rng("projection")
    bad = []
    for E, L in _level_pairs(model):
        d = L // E
        pts = model.points_at_level(E)
        if not exhaustive:
            pts = [rng.choice(pts) for _ in range(200)]
        for a in pts:
            want = model.index_of(model.group.scale(d, model.table[a]))
            if model.trace(model.restrict(a, E, L), L, E) != want:
                bad.append(f"point P{a} ({E}->{L})")
    yield record("projection.points", claim, not bad, exhaustive=exhaustive, counterexamples=bad[:3])

    bad = []
    for E, L in _level_pairs(model):
        for _ in range(20):
            c = Cycle(model, E, {a: rng.randint(-3, 3) for a in _random_points(model, E, rng, 3)})
            if tr_push(res_pull(c, E, L), L, E) != (L // E) * c:
                bad.append(f"{c.format()} ({E}->{L})")
    yield record("projection.cycles", claim, not bad, counterexamples=bad[:3])

    bad = []
    for r in range(1, ctx.r_max + 1):
        T, _ = layer.target(r)
        for E, L in _level_pairs(model):
            for _ in range(5):
                s = _random_symbol(model, r, rng, base=E)
                back = transfer_symbols(restrict_symbols(model, s, L), E)
                if layer.resolve(back) != T.scale(L // E, layer.resolve(s)):
                    bad.append(f"{s} ({E}->{L})")
    yield record("projection.symbols", claim, not bad, counterexamples=bad[:3])


def suite_albanese(ctx: Context) -> Iterator[dict]:
    layer = ctx.layer
    img, rat = layer.symbol_image(1), layer.rational_image()
    yield record("albanese.r1", "resolved arity-1 symbols span exactly A(k)", img == rat, order=rat.order())


def suite_injectivity(ctx: Context) -> Iterator[dict]:
    layer = ctx.layer
    for r in range(1, ctx.r_max + 1):
        F1 = layer.f_lattice(r + 1)
        ker = layer.phi_kernel_on_f(r)
        inj = all(v in F1 for v in ker)
        yield record(f"injectivity.kernel.r{r}", "Phi_r is injective on F^r/F^{r+1}", inj, kernel_generators=len(ker))
        surj = localize_compare(layer.phi_image(r), layer.symbol_image(r), factorial(r))
        yield record(f"injectivity.image.r{r}", "Phi_r(F^r) spans the resolved symbols after inverting r!", surj)


def _dd_zero(bar: BarComplex, i: int) -> bool:
    first, second = bar.coboundary_columns(i), bar.coboundary_columns(i + 1)
    C2 = bar.cochain_group(i + 2)
    for col in first:
        acc = [0] * C2.ngens
        for t, a in col.items():
            for u, b in second[t].items():
                acc[u] += a * b
        if any(C2.reduce(acc)):
            return False
    return True


def suite_cohomology(ctx: Context) -> Iterator[dict]:
    bad = []
    for m in range(1, 7):
        for n in range(1, 7):
            M = trivial_module(n, m)
            got = [_factors(cohomology(M, i)) for i in range(3)]
            g = gcd(m, n)
            want = [_factors(FgAbGroup([n])), _factors(FgAbGroup([g])), _factors(FgAbGroup([g]))]
            if got != want:
                bad.append({"m": m, "n": n, "got": got, "want": want})
    yield record("cohomology.cyclic_table", "H^i(Z/m, Z/n) = Z/n, Z/gcd, Z/gcd for i = 0, 1, 2", not bad, counterexamples=bad[:3])

    try:
        kd = kummer_data(ctx.model, ctx.n)
    except ScenarioError as exc:
        yield record("cohomology.module", "coboundary squared vanishes on A[n] modules", None, reason=str(exc))
        return
    base = kd.module
    ok, table = True, {}
    for r in (1, 2):
        M = base.tensor_power(r)
        W, _ = base.wedge(r)
        for m in ctx.model.levels:
            bar = BarComplex(M, m)
            ok &= all(_dd_zero(bar, i) for i in range(2))
        for i in range(3):
            table[f"tensor{r}.H{i}"] = _factors(cohomology(M, i))
            table[f"wedge{r}.H{i}"] = _factors(cohomology(W, i))
    yield record("cohomology.dd", "coboundary squared vanishes on A[n] modules", ok)

    annihilated = True
    for i in (1, 2):
        coh = cohomology_of(base, i)
        for e in coh.group.basis():
            x = CohClass(base, i, coh.representative(e))
            annihilated &= (ctx.model.N * x).is_zero()
    yield record("cohomology.annihilated", "N kills H^i(Z/N, A[n]) for i >= 1", annihilated, model=FINITE_QUOTIENT_TAG, **table)


def suite_kummer(ctx: Context) -> Iterator[dict]:
    model, n = ctx.model, ctx.n
    try:
        kd = kummer_data(model, n)
    except ScenarioError as exc:
        yield record("kummer.setup", "A[n] is rational over the universe field", None, reason=str(exc))
        return

    for m in model.levels:
        h, dom = kd.delta_hom(m)
        ker, nA = kd.delta_kernel(m), kd.n_multiples(m)
        yield record(
            f"kummer.exact.L{m}",
            "ker delta = n A(level)",
            ker == nA,
            image_order=image(h).order(),
            quotient_order=dom.order() // nA.order(),
            h1=_factors(cohomology(kd.module, 1, m)),
        )

    rng = ctx.rng("kummer.choice")
    ok = True
    torsion = [model.index_of(kd.pres.inclusion(t)) for t in kd.pres.group.elements()]
    for m in model.levels:
        dom = [a for a in model.points_at_level(m) if kd.divisible(a)]
        for a in rng.sample(dom, min(5, len(dom))):
            b0 = kd.division_point(a)
            for t in rng.sample(torsion, min(4, len(torsion))):
                ok &= kd.delta(a, m, model.add_idx(b0, t)) == kd.delta(a, m)
    yield record("kummer.choice", "delta does not depend on the division point", ok)

    rng = ctx.rng("kummer.relation1")
    div = [a for a in range(model.size) if kd.divisible(a)]
    bad = []
    for _ in range(RELATION_SAMPLES):
        E = rng.choice(model.levels)
        L = rng.choice([x for x in model.levels if x % E == 0])
        r = rng.randint(1, min(ctx.r_max, 3))
        b = rng.choice([a for a in div if L % model.level_of(a) == 0])
        rest = [rng.choice([a for a in div if E % model.level_of(a) == 0]) for _ in range(r - 1)]
        s = relation_one(model, L, E, b, rest, slot=rng.randrange(r))
        if not somekawa_s(kd, s).is_zero():
            bad.append(str(s))
    yield record("kummer.relation1", "s_n vanishes on the projection-formula relation", not bad, samples=RELATION_SAMPLES, counterexamples=bad[:3])

    if ctx.r_max >= 2:
        rng = ctx.rng("kummer.transposition")
        M2 = kd.module.tensor_power(2)
        ok = True
        for m in model.levels:
            coh = cohomology_of(M2, 2, m)
            for _ in range(3):
                x = CohClass(M2, 2, coh.representative(coh.group.random_element(rng)), m)
                ok &= (wedge_descend(kd, x) + wedge_descend(kd, permute_slots(x, [1, 0]))).is_zero()
        yield record("kummer.transposition", "p_wedge o t_* = -p_wedge", ok, model=FINITE_QUOTIENT_TAG)

    layer = ctx.layer
    for r in range(1, min(ctx.r_max, 3) + 1):
        rng = ctx.rng(f"kummer.kill.r{r}")
        upper = divisible_f_lattice(layer, kd, r + 1).rows()
        lower = divisible_f_lattice(layer, kd, r).rows()
        upper = rng.sample(upper, min(KILL_SAMPLES, len(upper)))
        lower = rng.sample(lower, min(KILL_SAMPLES, len(lower)))
        witnesses = [z for z in upper if not cycle_class(layer, kd, z, r).is_zero()]
        kills_n = all(cycle_class(layer, kd, {k: n * a for k, a in z.items()}, r).is_zero() for z in lower)
        nonzero = sum(not cycle_class(layer, kd, z, r).is_zero() for z in lower)
        W, _ = kd.module.wedge(r)
        yield record(
            f"kummer.kill.r{r}",
            "the cycle map kills F^{r+1} and n F^r",
            not witnesses and kills_n,
            sampled_upper=len(upper),
            witnesses=[{str(k): a for k, a in sorted(z.items())} for z in witnesses[:3]],
            sampled_lower=len(lower),
            nonzero_on_lower=nonzero,
            target=_factors(cohomology(W, r)),
            model=FINITE_QUOTIENT_TAG,
        )


@dataclass(frozen=True)
class Suite:
    name: str
    claim: str
    run: Callable[[Context], Iterator[dict]]


REGISTRY = {
    s.name: s
    for s in (
        Suite("roundtrip", "Phi_r o Psi_r = r!", suite_roundtrip),
        Suite("filtration", "G^{r+1} <= R^{r+1} <= F^{r+1} <= F^r", suite_filtration),
        Suite("f2r2", "F^2 = R^2 and B^3 = F^3 away from 2", suite_f2r2),
        Suite("projection", "trace o restrict = degree", suite_projection),
        Suite("albanese", "arity-1 symbols give A(k)", suite_albanese),
        Suite("injectivity", "Phi_r injective on graded pieces, image up to r!", suite_injectivity),
        Suite("cohomology", "bar-resolution cohomology backend", suite_cohomology),
        Suite("kummer", "Kummer map, s_n and the cycle map", suite_kummer),
    )
}


def run_suites(ctx: Context, names) -> list[dict]:
    out = []
    for name in names:
        out.extend(REGISTRY[name].run(ctx))
    return sorted(out, key=lambda rec: rec["id"])
