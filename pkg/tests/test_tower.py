import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from zerocyc.tower import CapExceeded, FieldTower, divisors, extension_splitting, find_modulus, is_irreducible, prime_factors


def mobius(n):
    ps = prime_factors(n)
    for p in ps:
        if n % (p * p) == 0:
            return 0
    return (-1) ** len(ps)


def necklace(p, D):
    return sum(mobius(d) * p ** (D // d) for d in divisors(D)) // D


@pytest.mark.parametrize("p,D", [(2, 2), (2, 3), (2, 4), (3, 2), (3, 3), (5, 2)])
def test_irreducible_count_matches_necklace_formula(p, D):
    count = sum(is_irreducible(list(c) + [1], p) for c in itertools.product(range(p), repeat=D))
    assert count == necklace(p, D)


def test_default_modulus():
    assert find_modulus(5, 6) == [2, 1, 0, 0, 0, 0, 1]


def test_frobenius_example():
    # t^2 + 2 over F_5: t^5 = t (t^2)^2 = 4t = -t
    F = FieldTower(5, 1, 2, modulus=[2, 0, 1])
    t = F.element([0, 1])
    assert t.frobenius() == -t
    assert F.frobenius(F.from_coeffs([3, 0])) == 3


def test_fixed_field_sizes():
    F = FieldTower(5, 1, 6)
    assert [len(F.fixed_field(m)) for m in F.levels] == [5, 25, 125, 15625]
    with pytest.raises(ValueError):
        F.fixed_field(4)


def test_errors():
    with pytest.raises(ValueError):
        FieldTower(6)
    with pytest.raises(ValueError):
        FieldTower(5, 1, 2, modulus=[1, 0, 1])  # t^2 + 1 = (t - 2)(t + 2)
    with pytest.raises(CapExceeded):
        FieldTower(5, 1, 6, cap=1000)


def test_extension_splitting():
    assert extension_splitting(6, 4) == (2, 3)
    assert extension_splitting(3, 3) == (3, 1)
    assert extension_splitting(1, 5) == (1, 1)


TOWERS = [FieldTower(2, 1, 4), FieldTower(3, 1, 2), FieldTower(5, 1, 2), FieldTower(2, 2, 2)]


@given(st.sampled_from(TOWERS), st.data())
def test_field_axioms_and_frobenius(F, data):
    x, y, z = (data.draw(st.integers(0, F.size - 1)) for _ in range(3))
    assert F.mul(x, F.add(y, z)) == F.add(F.mul(x, y), F.mul(x, z))
    assert F.add(x, F.neg(x)) == 0
    if x:
        assert F.mul(x, F.inv(x)) == 1
    assert F.frobenius(F.add(x, y)) == F.add(F.frobenius(x), F.frobenius(y))
    assert F.frobenius(F.mul(x, y)) == F.mul(F.frobenius(x), F.frobenius(y))
    assert F.frobenius(x, F.N) == x
    assert F.frobenius(x) == F.pow(x, F.q)
    m = F.level_of(x)
    assert x in F.fixed_field(m)


@given(st.sampled_from(TOWERS), st.data())
def test_sqrt(F, data):
    x = data.draw(st.integers(0, F.size - 1))
    s = F.sqrt(F.mul(x, x))
    assert s is not None and F.mul(s, s) == F.mul(x, x)


def test_field_elem_operators():
    F = FieldTower(3, 1, 2)
    a, b = F.element(4), F.element(7)
    assert (a + b) - b == a
    assert (a * b) / b == a
    assert a ** (F.size - 1) == 1
    assert (2 * a).value == F.mul(2, 4)
