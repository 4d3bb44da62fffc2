import random
from math import gcd

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from zerocyc.abgroup import AbHom, FgAbGroup, Subgroup, image, kernel, quotient
from zerocyc.gcoh import (
    BarComplex,
    CohClass,
    GModule,
    ScenarioError,
    block_swap,
    cohomology,
    cohomology_of,
    cor,
    cup,
    cycle_class,
    divisible_f_lattice,
    kummer_data,
    orbit_class,
    permute_slots,
    res,
    somekawa_s,
    trivial_module,
    wedge_descend,
    zero_class,
)
from zerocyc.points import build_mock
from zerocyc.symbols import SymbolExpr, layer_for
from zerocyc.tower import CapExceeded


def subquotient(A: Subgroup, B: Subgroup) -> tuple[int, ...]:
    """Invariant factors of A/B for B inside A."""
    P = A.as_group()
    return quotient(P.group, Subgroup(P.group, [P.coords_of(b) for b in B.generators])).group.invariant_factors


def periodic_oracle(M: GModule, i: int) -> tuple[int, ...]:
    """Cyclic-group cohomology from the 2-periodic resolution."""
    G = M.group
    one = AbHom.identity(G)
    g = M.action
    norm, power = AbHom.zero(G, G), one
    for _ in range(M.N):
        norm = norm + power
        power = g.compose(power)
    if i == 0:
        return kernel(g - one).as_group().group.invariant_factors
    if i % 2:
        return subquotient(kernel(norm), image(g - one))
    return subquotient(kernel(g - one), image(norm))


def module(moduli, matrix, N):
    G = FgAbGroup(moduli)
    return GModule(G, AbHom.from_matrix(G, G, matrix), N)


MODULES = {
    "sign": module([0], [[-1]], 2),
    "sign4": module([0], [[-1]], 4),
    "unit_mod7": module([7], [[2]], 3),
    "swap33": module([3, 3], [[0, 1], [1, 0]], 2),
    "rotation": module([0, 0], [[0, -1], [1, 0]], 4),
    "regular3": module([0, 0, 0], [[0, 0, 1], [1, 0, 0], [0, 1, 0]], 3),
    "mixed": module([2, 4], [[1, 0], [2, 1]], 2),
}


@pytest.mark.parametrize("name", sorted(MODULES))
@pytest.mark.parametrize("i", [0, 1, 2, 3])
def test_bar_cohomology_matches_periodic_resolution(name, i):
    M = MODULES[name]
    assert cohomology(M, i).invariant_factors == periodic_oracle(M, i)


def test_regular_module_is_acyclic():
    M = MODULES["regular3"]
    assert all(cohomology(M, i).is_trivial() for i in (1, 2, 3))


@pytest.mark.parametrize("m,n", [(m, n) for m in range(1, 7) for n in range(1, 7)])
def test_trivial_cyclic_table(m, n):
    M = trivial_module(n, m)
    g = FgAbGroup([gcd(m, n)]).invariant_factors
    assert [cohomology(M, i).invariant_factors for i in range(4)] == [FgAbGroup([n]).invariant_factors, g, g, g]


@pytest.mark.parametrize("m", [1, 2, 3, 5])
def test_integer_coefficients(m):
    M = trivial_module(0, m)
    assert cohomology(M, 0).invariant_factors == (0,)
    assert cohomology(M, 1).is_trivial()
    assert cohomology(M, 2).order == m


@pytest.mark.parametrize("name", sorted(MODULES))
def test_coboundary_squares_to_zero(name):
    bar = BarComplex(MODULES[name])
    for i in range(3):
        first, second = bar.coboundary_columns(i), bar.coboundary_columns(i + 1)
        C2 = bar.cochain_group(i + 2)
        for col in first:
            acc = [0] * C2.ngens
            for t, a in col.items():
                for u, b in second[t].items():
                    acc[u] += a * b
            assert not any(C2.reduce(acc))


def test_coboundary_agrees_with_columns():
    M = MODULES["mixed"]
    bar = BarComplex(M)
    rng = random.Random(1)
    for i in range(3):
        C = bar.cochain_group(i)
        cols = bar.coboundary_columns(i)
        for _ in range(5):
            f = C.random_element(rng)
            via_cols = [0] * bar.cochain_group(i + 1).ngens
            for t, a in enumerate(f):
                for u, b in cols[t].items():
                    via_cols[u] += a * b
            assert bar.coboundary(f, i) == bar.cochain_group(i + 1).reduce(via_cols)


def all_classes(M, i, m=1):
    coh = cohomology_of(M, i, m)
    return [CohClass(M, i, coh.representative(e), m) for e in coh.group.elements()]


@pytest.mark.parametrize("name", ["swap33", "mixed", "unit_mod7"])
def test_group_order_kills_cohomology(name):
    M = MODULES[name]
    for i in (1, 2, 3):
        for x in all_classes(M, i):
            assert (M.N * x).is_zero()


def test_class_arithmetic():
    M = trivial_module(6, 6)
    xs = all_classes(M, 1)
    assert len(xs) == 6
    for x in xs:
        assert (x - x).is_zero() and (x + (-x)).is_zero()
        assert x == x + zero_class(M, 1)
    with pytest.raises(ValueError):
        CohClass(M, 1, [1] + [0] * 5)  # not a crossed homomorphism
    with pytest.raises(ValueError):
        cohomology_of(M, 4)
    with pytest.raises(ValueError):
        BarComplex(M, 4)


def test_cochain_cap():
    M = trivial_module(0, 60)
    with pytest.raises(CapExceeded):
        BarComplex(M).cochain_group(3)


BASE = trivial_module(6, 6)
UNIPOTENT = module([3, 3], [[1, 1], [0, 1]], 6)


def classes(M, degree, m=1):
    coh = cohomology_of(M, degree, m)
    return st.sampled_from(list(coh.group.elements())).map(lambda e: CohClass(M, degree, coh.representative(e), m))


@settings(max_examples=25)
@given(classes(BASE, 1), classes(BASE, 1), classes(BASE, 1))
def test_cup_is_associative_and_bilinear(x, y, z):
    assert cup(cup(x, y), z) == cup(x, cup(y, z))
    assert cup(x, y + z) == cup(x, y) + cup(x, z)
    # rank one coefficients: swapping slots is trivial, so odd squares are 2-torsion
    assert (2 * cup(x, x)).is_zero()


@settings(max_examples=25)
@given(st.integers(0, 2), st.integers(1, 2), st.data())
def test_graded_commutativity(i, j, data):
    if i + j > 3:
        return
    M = UNIPOTENT
    x = data.draw(classes(M, i))
    y = data.draw(classes(M, j))
    xy = cup(x, y)
    yx = permute_slots(cup(y, x), block_swap(1, 1))
    assert yx == (-1) ** (i * j) * xy


@pytest.mark.parametrize("m", [2, 3, 6])
def test_cor_res_is_multiplication_by_the_index(m):
    for M in (BASE, UNIPOTENT):
        for i in (0, 1, 2):
            for x in all_classes(M, i)[:6]:
                assert cor(res(x, m), 1) == m * x


def test_res_is_compatible_with_cup():
    for x in all_classes(BASE, 1):
        for y in all_classes(BASE, 1)[:3]:
            assert res(cup(x, y), 2) == cup(res(x, 2), res(y, 2))


def test_projection_formula():
    """Cor(res x ∪ y) = x ∪ Cor y."""
    M = UNIPOTENT
    for x in all_classes(M, 1):
        for y in all_classes(M, 1, 2):
            assert cor(cup(res(x, 2), y), 1) == cup(x, cor(y, 1))


def test_res_cor_errors():
    x = all_classes(BASE, 1)[1]
    with pytest.raises(ValueError):
        res(x, 4)
    with pytest.raises(ValueError):
        cor(res(x, 2), 3)


def test_wedge_module():
    base = GModule.trivial(FgAbGroup([3, 3]), 2)
    W, p = base.wedge(2)
    assert W.group.invariant_factors == (3,)
    W1, _ = base.wedge(1)
    assert W1.group.is_trivial()
    T = base.tensor_power(2)
    assert p(T.tp.pure([1, 0], [0, 1])) == W.group.neg(p(T.tp.pure([0, 1], [1, 0])))
    with pytest.raises(ValueError):
        T.tensor_power(2)


# ---------------------------------------------------------------------------
# Kummer map


def brute_n_multiples(model, n, m):
    pts = [b for b in range(model.size) if m % model.level_of(b) == 0]
    return {model.index_of(model.group.scale(n, model.table[b])) for b in pts}


@pytest.mark.parametrize("name,n", [("z9", 3), ("swap", 3), ("elliptic", 2), ("wedge9", 3)])
def test_delta_kernel_is_n_multiples(name, n, request):
    model = request.getfixturevalue(name)
    kd = kummer_data(model, n)
    for m in model.levels:
        dom = [a for a in model.points_at_level(m) if kd.divisible(a)]
        if model.size > 2000:
            dom = random.Random(m).sample(dom, min(60, len(dom)))
        want = brute_n_multiples(model, n, m)
        for a in dom:
            assert kd.delta(a, m).is_zero() == (a in want)
        assert kd.delta_kernel(m) == kd.n_multiples(m)


def test_delta_is_additive(z9):
    kd = kummer_data(z9, 3)
    div = [a for a in z9.points_at_level(3) if kd.divisible(a)]
    for a in div:
        for b in div:
            assert kd.delta(z9.add_idx(a, b), 3) == kd.delta(a, 3) + kd.delta(b, 3)


def test_delta_ignores_the_division_point(elliptic):
    kd = kummer_data(elliptic, 2)
    rng = random.Random(4)
    torsion = [elliptic.index_of(kd.pres.inclusion(t)) for t in kd.pres.group.elements()]
    assert len(torsion) == 4
    for m in elliptic.levels:
        div = [a for a in elliptic.points_at_level(m) if kd.divisible(a)]
        for a in rng.sample(div, min(4, len(div))):
            b = kd.division_point(a)
            for t in torsion:
                assert kd.delta(a, m, elliptic.add_idx(b, t)) == kd.delta(a, m)
    a = next(x for x in elliptic.points_at_level(1) if kd.divisible(x) and x != elliptic.zero_index)
    with pytest.raises(ValueError):
        kd.delta(a, 1, elliptic.zero_index)


def test_delta_nonzero_on_z9(z9):
    kd = kummer_data(z9, 3)
    dom = kd.domain(1)
    assert dom.order() == 3 and kd.n_multiples(1).order() == 1
    a = next(x for x in z9.points_at_level(1) if x != z9.zero_index)
    d = kd.delta(a, 1)
    assert not d.is_zero()
    assert cohomology(kd.module, 1).invariant_factors == (3,)
    h, _ = kd.delta_hom(1)
    assert image(h).order() == 3


def test_swap_domain_is_trivial(swap):
    kd = kummer_data(swap, 3)
    assert kd.domain(1).order() == 1 and kd.domain(2).order() == 1
    assert kd.divisible(swap.zero_index)
    assert not kd.divisible(swap.index_of((1, 0)))
    with pytest.raises(ScenarioError):
        kd.division_point(swap.index_of((1, 0)))


def test_kummer_scenario_errors(elliptic, swap):
    with pytest.raises(ScenarioError):
        kummer_data(elliptic, 5)  # the characteristic
    with pytest.raises(ScenarioError):
        kummer_data(elliptic, 7)  # A[7] is not rational over the universe field
    with pytest.raises(ValueError):
        kummer_data(swap, 0)
    layer = layer_for(swap)
    kd = kummer_data(swap, 3)
    k = next(k for k in range(layer.space.rank) if not kd.divisible(layer.space.rep[k]))
    with pytest.raises(ScenarioError):
        orbit_class(layer, kd, k, 1)


# ---------------------------------------------------------------------------
# s_n and the cycle map


@pytest.fixture(scope="module")
def z4():
    # Z/4 with Frobenius -1: A[2] = {0, 2} with trivial action
    return build_mock([4], [[3]], 2)


def test_sn_square_on_z4(z4):
    kd = kummer_data(z4, 2)
    a = z4.index_of((2,))
    assert not kd.delta(a, 1).is_zero()
    s = somekawa_s(kd, SymbolExpr(2, [(1, 1, (a, a))]))
    # the square of the generator of H^1(Z/2, F_2) is the generator of H^2
    assert not s.is_zero()
    assert wedge_descend(kd, s).is_zero()  # but the wedge square of Z/2 vanishes


def test_sn_is_symmetric_after_descent(elliptic):
    kd = kummer_data(elliptic, 2)
    rng = random.Random(11)
    for E in elliptic.levels:
        div = [a for a in elliptic.points_at_level(E) if kd.divisible(a)]
        for _ in range(3):
            a, b = rng.choice(div), rng.choice(div)
            ab = somekawa_s(kd, SymbolExpr(2, [(1, E, (a, b))]))
            ba = somekawa_s(kd, SymbolExpr(2, [(1, E, (b, a))]))
            assert wedge_descend(kd, ab) == wedge_descend(kd, ba)


def test_transposition_flips_the_wedge_sign(z9):
    kd = kummer_data(z9, 3)
    M2 = kd.module.tensor_power(2)
    for m in z9.levels:
        for x in all_classes(M2, 2, m):
            assert (wedge_descend(kd, x) + wedge_descend(kd, permute_slots(x, [1, 0]))).is_zero()


def test_sn_input_checks(z9):
    kd = kummer_data(z9, 3)
    with pytest.raises(ValueError):
        somekawa_s(kd, SymbolExpr(1, [(1, 3, (1,))], base=3))
    with pytest.raises(ValueError):
        wedge_descend(kd, zero_class(BASE, 1))


@pytest.mark.parametrize("name,n", [("z9", 3), ("elliptic", 2)])
def test_cycle_map_kills_the_next_filtration_step(name, n, request):
    model = request.getfixturevalue(name)
    layer, kd = layer_for(model), kummer_data(model, n)
    rng = random.Random(2)
    for r in (1, 2):
        upper = divisible_f_lattice(layer, kd, r + 1).rows()
        for z in rng.sample(upper, min(10, len(upper))):
            assert cycle_class(layer, kd, z, r).is_zero()
        lower = divisible_f_lattice(layer, kd, r).rows()
        for z in rng.sample(lower, min(10, len(lower))):
            assert cycle_class(layer, kd, {k: n * a for k, a in z.items()}, r).is_zero()


def test_cycle_map_on_wedge9_does_not_kill_f3(wedge9):
    """Regression fixture: the symmetrized-tensor target leaves a survivor."""
    layer, kd = layer_for(wedge9), kummer_data(wedge9, 3)
    z = {0: -2, 1: 1, 2: 1}
    assert not layer.f_lattice(3).reduce(z)
    c = cycle_class(layer, kd, z, 2)
    assert not c.is_zero()
    W, _ = kd.module.wedge(2)
    assert cohomology(W, 2).invariant_factors == (3,)
    with pytest.raises(ValueError):
        cycle_class(layer, kd, {1: 1}, 2)


def test_cycle_class_vanishes_in_arity_one(z9):
    layer, kd = layer_for(z9), kummer_data(z9, 3)
    for z in divisible_f_lattice(layer, kd, 1).rows():
        assert cycle_class(layer, kd, z, 1).is_zero()
