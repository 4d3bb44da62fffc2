import pytest
from hypothesis import given
from hypothesis import strategies as st

from zerocyc.cycles import Cycle, CycleSpace, g_filtration, pontryagin, res_pull, tr_push, w_generator
from zerocyc.points import build_mock

MOCKS = {
    "swap": ([3, 3], [[0, 1], [1, 0]], 2),
    "z9": ([9], [[4]], 3),
    "z5": ([5], [[2]], 4),
    "cyc3": ([2, 2, 2], [[0, 0, 1], [1, 0, 0], [0, 1, 0]], 3),
    "z4sq": ([4, 4], [[0, 3], [1, 0]], 4),
}


@pytest.fixture(scope="module", params=sorted(MOCKS))
def mock(request):
    return build_mock(*MOCKS[request.param])


def test_structural_g_matches_enumeration(mock):
    """The binomial-ring computation of G^r against its defining generators."""
    sp = CycleSpace(mock)
    for r in range(1, 5):
        assert sp.g_lattice(r) == sp.g_lattice_enumerated(r)


def test_g_is_decreasing(mock):
    sp = CycleSpace(mock)
    for r in range(0, 4):
        assert sp.g_lattice(r + 1) <= sp.g_lattice(r)


def test_g1_is_degree_zero(mock):
    sp = CycleSpace(mock)
    G1 = sp.subgroup(sp.g_lattice(1))
    for k in range(sp.rank):
        assert G1.contains([sp.deg[j] if j == k else 0 for j in range(sp.rank)]) == (sp.deg[k] == 0)
    for k in range(1, sp.rank):
        v = [0] * sp.rank
        v[k], v[0] = 1, -sp.deg[k]
        assert G1.contains(v)


def test_elliptic_sampled_generators_lie_in_g3(elliptic):
    sp = CycleSpace(elliptic)
    sampled = sp.g_lattice_enumerated(3, cap=10**4, samples=200)
    assert sampled <= sp.g_lattice(3)


def test_cycle_basics(swap):
    a = swap.index_of((1, 0))
    c = Cycle.point(swap, a, 1)
    assert c.degree() == 2
    assert (2 * c - c) == c
    assert (c - c).is_zero()
    with pytest.raises(ValueError):
        Cycle(swap, 1, {a: 1})
    with pytest.raises(ValueError):
        Cycle(swap, 3)
    assert Cycle(swap, 1).format() == "0"
    assert "[P" in c.format()


def test_trace_restrict_on_cycles(z9):
    for i in range(z9.size):
        c = Cycle.point(z9, i, z9.level_of(i))
        E = c.level
        for L in z9.levels:
            if L % E == 0:
                assert tr_push(res_pull(c, E, L), L, E) == (L // E) * c
        assert tr_push(c, E, 1).degree() == c.degree() * E


@given(st.lists(st.integers(0, 8), min_size=3, max_size=3), st.lists(st.integers(-3, 3), min_size=3, max_size=3))
def test_pontryagin_ring_axioms(idx, coeffs):
    M = build_mock([9], [[4]], 3)
    cs = [Cycle(M, 3, {i: a}) for i, a in zip(idx, coeffs)]
    x, y, z = cs
    assert pontryagin(x, y) == pontryagin(y, x)
    assert pontryagin(pontryagin(x, y), z) == pontryagin(x, pontryagin(y, z))
    assert pontryagin(x, y + z) == pontryagin(x, y) + pontryagin(x, z)
    assert pontryagin(x, y).degree() == x.degree() * y.degree()


def test_w_generator_is_a_traced_product(z9):
    a, b = 1, 2
    u = Cycle(z9, 3, {a: 1, z9.zero_index: -1})
    v = Cycle(z9, 3, {b: 1, z9.zero_index: -1})
    assert w_generator(z9, 3, [a, b]) == tr_push(pontryagin(u, v), 3, 1)
    assert w_generator(z9, 3, [a, b]).degree() == 0
    with pytest.raises(ValueError):
        w_generator(z9, 1, [1])


def test_w_vector_matches_w_generator(mock):
    sp = CycleSpace(mock)
    for E in mock.levels:
        pts = mock.points_at_level(E)[:4]
        for a in pts:
            for b in pts:
                assert sp.cycle(sp.w_vector(E, (a, b))) == w_generator(mock, E, (a, b))


def test_g_filtration_api(swap):
    G = g_filtration(swap, 2)
    assert G.ambient.ngens == CycleSpace(swap).rank
    with pytest.raises(ValueError):
        g_filtration(swap, 2, level=2)
