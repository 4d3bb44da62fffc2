from fractions import Fraction
from itertools import combinations
from math import gcd

import pytest
from hypothesis import given
from hypothesis import strategies as st

from zerocyc.lattice import Lattice, identity, matmul, smith_form, snf, xgcd


def det(m):
    """Exact determinant by fraction elimination."""
    a = [[Fraction(x) for x in row] for row in m]
    n, d = len(a), Fraction(1)
    for i in range(n):
        p = next((r for r in range(i, n) if a[r][i]), None)
        if p is None:
            return 0
        if p != i:
            a[i], a[p] = a[p], a[i]
            d = -d
        d *= a[i][i]
        for r in range(i + 1, n):
            f = a[r][i] / a[i][i]
            a[r] = [x - f * y for x, y in zip(a[r], a[i])]
    return int(d)


def determinantal_divisors(m):
    """d_k = gcd of all k x k minors; the invariant factors are d_k / d_{k-1}."""
    rows, cols = len(m), len(m[0]) if m else 0
    out, prev = [], 1
    for k in range(1, min(rows, cols) + 1):
        g = 0
        for R in combinations(range(rows), k):
            for C in combinations(range(cols), k):
                g = gcd(g, det([[m[i][j] for j in C] for i in R]))
        if g == 0:
            break
        out.append(g // prev)
        prev = g
    return out


matrices = st.integers(1, 4).flatmap(
    lambda r: st.integers(1, 4).flatmap(lambda c: st.lists(st.lists(st.integers(-12, 12), min_size=c, max_size=c), min_size=r, max_size=r))
)


def test_xgcd():
    for a, b in [(12, 18), (-4, 6), (0, 5), (7, 0), (0, 0), (-3, -9)]:
        g, s, t = xgcd(a, b)
        assert g == gcd(a, b) and s * a + t * b == g


def test_snf_small_examples():
    assert snf([[2, 0], [0, 3]])[0] == [1, 6]
    assert snf([[2, 4, 4], [-6, 6, 12], [10, -4, -16]])[0] == [2, 6, 12]
    assert snf([[0, 0], [0, 0]])[0] == []


@given(matrices)
def test_snf_against_minors(m):
    assert list(snf(m)[0]) == determinantal_divisors(m)


@given(matrices)
def test_snf_transforms(m):
    s = smith_form(m)
    rows, cols = len(m), len(m[0])
    D = matmul(matmul(s.left, m), s.right)
    for i in range(rows):
        for j in range(cols):
            want = s.diagonal[i] if i == j and i < len(s.diagonal) else 0
            assert D[i][j] == want
    assert abs(det(s.left)) == 1 and abs(det(s.right)) == 1
    assert matmul(s.right, s.right_inv) == identity(cols)
    for a, b in zip(s.diagonal, s.diagonal[1:]):
        assert b % a == 0
    assert all(d > 0 for d in s.diagonal)


def test_lattice_membership_and_canonical_rows():
    L = Lattice([{0: 2, 1: 1}, {1: 3}])
    assert {0: 2, 1: 4} in L
    assert {0: 1} not in L
    # the same lattice from another basis has the same canonical rows
    M = Lattice([{1: 3}, {0: 2, 1: 4}])
    assert L == M
    assert L.rank == 2


@given(st.lists(st.dictionaries(st.integers(0, 4), st.integers(-6, 6), max_size=4), max_size=6), st.dictionaries(st.integers(0, 4), st.integers(-6, 6), max_size=4))
def test_lattice_reduce_is_canonical(gens, v):
    L = Lattice(gens)
    r = L.reduce(v)
    for g in gens:
        assert g in L or not any(g.values())
        # adding a lattice element does not change the remainder
        w = dict(v)
        for k, x in g.items():
            w[k] = w.get(k, 0) + 3 * x
        assert L.reduce(w) == r


def test_contains_localized():
    L = Lattice([{0: 4}, {1: 3}])
    assert L.contains_localized({0: 1}, 2)
    assert not L.contains_localized({1: 1}, 2)
    assert L.contains_localized({1: 1, 0: 1}, 6)
    with pytest.raises(ValueError):
        L.contains_localized({0: 1}, 0)
