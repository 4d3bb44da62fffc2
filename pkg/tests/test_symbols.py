import random
from math import factorial

import pytest
from hypothesis import given
from hypothesis import strategies as st

from zerocyc.abgroup import Subgroup, localize_compare, quotient
from zerocyc.cycles import Cycle
from zerocyc.points import build_mock
from zerocyc.symbols import (
    SymbolExpr,
    SymbolLayer,
    compare_b_f,
    f_filtration,
    layer_for,
    parse_symbol,
    relation_one,
    restrict_symbols,
    transfer_symbols,
)

MOCKS = {
    "swap": ([3, 3], [[0, 1], [1, 0]], 2),
    "z9": ([9], [[4]], 3),
    "z2": ([2], [[1]], 1),
    "cyc3": ([2, 2, 2], [[0, 0, 1], [1, 0, 0], [0, 1, 0]], 3),
    "z5": ([5], [[2]], 4),
    "wedge9": ([9, 9], [[0, 8], [1, 8]], 3),
}


@pytest.fixture(scope="module", params=sorted(MOCKS))
def layer(request):
    return SymbolLayer(build_mock(*MOCKS[request.param]), 3)


def random_symbol(model, r, rng, base=1):
    levels = [E for E in model.levels if E % base == 0]
    terms = []
    for _ in range(rng.randint(1, 3)):
        E = rng.choice(levels)
        pts = model.points_at_level(E)
        terms.append((rng.randint(-3, 3), E, [rng.choice(pts) for _ in range(r)]))
    return SymbolExpr(r, terms, base)


def test_parse_and_format_roundtrip():
    s = parse_symbol("2*{P1,P2}_2 - {P0,P3}_1")
    assert s.terms == [(2, 2, (1, 2)), (-1, 1, (0, 3))]
    assert str(s) == "2*{P1,P2}_2 - {P0,P3}_1"
    assert parse_symbol(str(s)).terms == s.terms
    assert parse_symbol("{P4}_3 + 5{P1}_1").terms == [(1, 3, (4,)), (5, 1, (1,))]


@pytest.mark.parametrize("bad", ["", "{P1,P2}_2 +", "{P1,Q2}_2", "{P1}_1 {P2}_1", "{P1}_1 - {P1,P2}_1", "P1_2"])
def test_parse_errors(bad):
    with pytest.raises(ValueError):
        parse_symbol(bad)


def test_parse_error_reports_the_column():
    with pytest.raises(ValueError, match="column 11"):
        parse_symbol("{P1,P2}_2 + ")


def test_validate(swap):
    a = swap.index_of((1, 0))
    with pytest.raises(ValueError):
        SymbolExpr(1, [(1, 1, [a])]).validate(swap)
    with pytest.raises(ValueError):
        SymbolExpr(1, [(1, 2, [99])]).validate(swap)
    with pytest.raises(ValueError):
        SymbolExpr(2, [(1, 2, [a])])


def test_roundtrip_is_multiplication_by_r_factorial(layer):
    rng = random.Random(7)
    model = layer.model
    for r in (1, 2, 3):
        T, _ = layer.target(r)
        for _ in range(40):
            s = random_symbol(model, r, rng)
            assert layer.phi_vector(layer.psi_vector(s), r) == T.scale(factorial(r), layer.resolve(s))
            assert layer.psi(s) == layer.space.cycle(layer.psi_vector(s))


def test_relation_one_resolves_to_zero(layer):
    rng = random.Random(3)
    model = layer.model
    for _ in range(40):
        E = rng.choice(model.levels)
        L = rng.choice([x for x in model.levels if x % E == 0])
        r = rng.randint(1, 3)
        b = rng.choice(model.points_at_level(L))
        rest = [rng.choice(model.points_at_level(E)) for _ in range(r - 1)]
        s = relation_one(model, L, E, b, rest, slot=rng.randrange(r))
        assert not any(layer.resolve(s))


def test_projection_formula_on_symbols(layer):
    rng = random.Random(5)
    model = layer.model
    for r in (1, 2, 3):
        T, _ = layer.target(r)
        for E in model.levels:
            for L in model.levels:
                if L % E:
                    continue
                s = random_symbol(model, r, rng, base=E)
                back = transfer_symbols(restrict_symbols(model, s, L), E)
                assert layer.resolve(back) == T.scale(L // E, layer.resolve(s))


def test_base_change_is_identity_on_resolutions(z9):
    layer = layer_for(z9)
    s = SymbolExpr(2, [(1, 3, (1, 2))], 1)
    up = restrict_symbols(z9, s, 3)
    assert up.base == 3 and len(up.terms) == 3
    with pytest.raises(ValueError):
        transfer_symbols(up, 2)
    with pytest.raises(ValueError):
        restrict_symbols(z9, up, 1)
    assert layer.resolve(transfer_symbols(up, 1)) == layer.target(2)[0].scale(3, layer.resolve(s))


def test_filtration_chain(layer):
    for r in range(0, 4):
        assert layer.f_lattice(r + 1) <= layer.f_lattice(r)
    for r in (1, 2, 3):
        assert layer.g_lattice(r + 1) <= layer.r_lattice(r) <= layer.f_lattice(r + 1)
        assert layer.b_lattice(r + 1) <= layer.f_lattice(r + 1)


def test_f2_equals_r2_and_b3_away_from_2(layer):
    assert layer.r_lattice(1) == layer.f_lattice(2)
    B, F = layer.subgroup(layer.b_lattice(3)), layer.subgroup(layer.f_lattice(3))
    assert B <= F
    if layer.model.group.invariant_factors == (9, 9):
        # the symmetrized-tensor target is too coarse here: the gap is 3-primary
        assert not localize_compare(B, F, 2) and localize_compare(B, F, 6)
    else:
        assert localize_compare(B, F, 2)


def test_b3_gap_on_wedge9(wedge9):
    layer = layer_for(wedge9)
    F = layer.subgroup(layer.f_lattice(3)).as_group()
    rank = layer.space.rank
    B = [tuple(row.get(k, 0) for k in range(rank)) for row in layer.b_lattice(3).rows()]
    gap = quotient(F.group, Subgroup(F.group, [F.coords_of(b) for b in B]))
    assert gap.group.invariant_factors == (3,)


def test_phi_graded_injectivity_and_image(layer):
    for r in (1, 2, 3):
        F1 = layer.f_lattice(r + 1)
        assert all(v in F1 for v in layer.phi_kernel_on_f(r))
        assert localize_compare(layer.phi_image(r), layer.symbol_image(r), factorial(r))


def test_phi_of_a_cycle(z9):
    layer = layer_for(z9)
    c = Cycle.point(z9, 1, 3)
    s = layer.phi(c, 2)
    assert s.base == 3 and s.terms == [(1, 3, (1, 1))]
    assert layer.phi(c, 0).terms == [(1, 3, ())]


def test_targets(elliptic):
    layer = layer_for(elliptic)
    assert [layer.target(r)[0].invariant_factors for r in (1, 2, 3)] == [(72, 216), (72, 72, 216), (72, 72, 72, 216)]
    for r in (1, 2, 3):
        layer.target_frobenius(r)


def test_albanese_image(layer):
    assert layer.symbol_image(1) == layer.rational_image()


def test_module_level_helpers(swap):
    F = f_filtration(swap, 3)
    assert len(F) == 4 and all(F[i + 1] <= F[i] for i in range(3))
    assert compare_b_f(swap, 3)


@given(st.integers(0, 8), st.integers(0, 8))
def test_symbol_arithmetic(i, j):
    s = SymbolExpr(2, [(1, 2, (i, j))])
    t = SymbolExpr(2, [(2, 1, (j, i))])
    assert (s + t - t).terms[:1] == s.terms
    assert (3 * s).terms == [(3, 2, (i, j))]
    assert (-s).terms == [(-1, 2, (i, j))]
